"""Confinement envelope: the moving barrier R_L(t) and its constants.

The recursion's hitting times obey a cubic sandwich t_n ~ 4^{3n}; writing
c5 for the extracted lower constant, the tail-decay estimate takes the
form  tail(phi(L) t^{1/3} log^2 t) <= c7 t^{-L}  with

    phi(L) = 16 ((L - 1/3) / (c4 log 4))^2 / c5^{1/3},
    c7     = c3 * c5^{1/3},

valid for L above L0 = 1/3 + (c4 log 4)/2 and t past a switch time
T = c5 * 4^{3(m-1)} chosen so T >= e.  The barrier itself is

    R_L(t) = 2 (phi(L) t^{1/3} log^2 t + 1),
    d/dt R_L(t) = 2 phi(L) t^{-2/3} log t (log t / 3 + 2).

log t makes the barrier formulas meaningless below t = 1 and they are
only ever applied past T >= e, so all envelope evaluations here require
t >= 1.  The constants L1, L2 and c8 appearing further down the
confinement argument depend on unquantified absolute-constant steps and
cannot be extracted numerically; reports flag them as non-derivable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .recursion import RecursionParams

LOG4 = math.log(4.0)
L_CRITICAL = 1.0 / 3.0

# constants in the confinement argument that rest on unquantified
# absolute-constant inequalities; they cannot be computed, only flagged
NON_DERIVABLE_CONSTANTS = ("L1", "L2", "c8")


@dataclass(frozen=True)
class EnvelopeParams:
    """Inputs for the barrier: sandwich constant c5, recursion c4, rate L."""

    c5: float
    c4: float
    L: float

    def __post_init__(self):
        if not (math.isfinite(self.c5) and self.c5 > 0.0):
            raise ValueError(f"c5 must be positive, got {self.c5!r}")
        if not (math.isfinite(self.c4) and self.c4 > 0.0):
            raise ValueError(f"c4 must be positive, got {self.c4!r}")
        if not (math.isfinite(self.L) and self.L > L_CRITICAL):
            raise ValueError(f"L must exceed 1/3, got {self.L!r}")

    @classmethod
    def from_recursion(
        cls, params: RecursionParams, hitting_ts: list[float], L: float
    ) -> "EnvelopeParams":
        c5, _ = sandwich_constants(hitting_ts)
        return cls(c5=c5, c4=params.c4, L=L)


def sandwich_constants(hitting_ts: list[float]) -> tuple[float, float]:
    """(c5, c6') = (min, max) of t_n 4^{-3n} over the computed n >= 1.

    hitting_ts is the [t_0, t_1, ...] list; t_0 = 0 is excluded.
    """
    if len(hitting_ts) < 2:
        raise ValueError("need at least t_1 to extract sandwich constants")
    ratios = [t * 4.0 ** (-3 * n) for n, t in enumerate(hitting_ts) if n >= 1]
    return min(ratios), max(ratios)


def phi_of_L(env: EnvelopeParams) -> float:
    s = (env.L - L_CRITICAL) / (env.c4 * LOG4)
    return 16.0 * s * s / env.c5 ** (1.0 / 3.0)


def _check_time(t) -> np.ndarray:
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 1.0):
        raise ValueError("envelope formulas use log t; restricted to t >= 1")
    return t_arr


def envelope_R(env: EnvelopeParams, t):
    """Barrier radius R_L(t) = 2 (phi t^{1/3} log^2 t + 1) for t >= 1."""
    t_arr = _check_time(t)
    lg = np.log(t_arr)
    out = 2.0 * (phi_of_L(env) * np.cbrt(t_arr) * lg * lg + 1.0)
    return float(out) if np.isscalar(out) or out.ndim == 0 else out


def envelope_R_derivative(env: EnvelopeParams, t):
    """d/dt R_L(t) = 2 phi t^{-2/3} log t (log t / 3 + 2) for t >= 1."""
    t_arr = _check_time(t)
    lg = np.log(t_arr)
    out = 2.0 * phi_of_L(env) * t_arr ** (-2.0 / 3.0) * lg * (lg / 3.0 + 2.0)
    return float(out) if np.isscalar(out) or out.ndim == 0 else out


def derived_L0(c4: float) -> float:
    """Smallest admissible decay rate: L0 = 1/3 + (c4 log 4) / 2."""
    return L_CRITICAL + 0.5 * c4 * LOG4


def switch_time(c5: float, n0: int) -> tuple[float, int]:
    """(T, m): T = c5 4^{3(m-1)} with m >= n0 minimal such that T >= e."""
    m = n0
    while c5 * 4.0 ** (3 * (m - 1)) < math.e:
        m += 1
    return c5 * 4.0 ** (3 * (m - 1)), m


def envelope_constants(params: RecursionParams, hitting_ts: list[float]) -> dict:
    """Constants extracted from a computed hitting-time table, JSON-friendly.

    c5/c6' come from the sandwich, c7 = c3 c5^{1/3}, L0 from c4, and the
    switch time T from c5 and n0; L1, L2, c8 are flagged non-derivable.
    """
    c5, c6p = sandwich_constants(hitting_ts)
    T, m = switch_time(c5, params.n0)
    return {
        "c5": c5,
        "c6_prime": c6p,
        "sandwich_spread": c6p / c5,
        "c7": params.c3 * c5 ** (1.0 / 3.0),
        "L0": derived_L0(params.c4),
        "switch_time_T": T,
        "switch_level": m,
        "non_derivable": list(NON_DERIVABLE_CONSTANTS),
    }
