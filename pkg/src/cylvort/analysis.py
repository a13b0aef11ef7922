"""Empirical confrontation of run diagnostics with the confinement bounds.

Everything here consumes DiagnosticsRecord sequences (in memory or read
back from CSV) and produces JSON-friendly reports: conservation drift,
the a^{-2} tail-mass inequality with its empirical constant, a growth
exponent fitted to the diameter envelope, and a comparison of the
diameter against the moving barrier 2 R_L(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensemble import DiagnosticsRecord
from .envelope import EnvelopeParams, envelope_R, phi_of_L
from .errors import ConfigError

L_CRITICAL = 1.0 / 3.0
LOG4 = math.log(4.0)


def _float_or_none(v: float):
    return None if not math.isfinite(v) else float(v)


def conservation_drift(records: list[DiagnosticsRecord]) -> dict:
    """Max drift of the conserved quantities relative to the t=0 record.

    h drift is normalized by the initial absolute first moment (its
    natural scale); energy entries are None when the run recorded NaN
    energies (zero-core ensembles).
    """
    if not records:
        raise ValueError("no records")
    r0 = records[0]
    mass_d = max(abs(r.mass - r0.mass) for r in records)
    h_d = max(abs(r.h_center - r0.h_center) for r in records)
    e_vals = [r.energy for r in records]
    if all(math.isfinite(e) for e in e_vals):
        e_d = max(abs(e - r0.energy) for e in e_vals)
        e_rel = e_d / abs(r0.energy) if r0.energy != 0.0 else math.inf
    else:
        e_d = e_rel = math.nan
    return {
        "t_span": [r0.t, records[-1].t],
        "mass_drift": mass_d,
        "h_drift": h_d,
        "h_drift_rel_abs_moment": h_d / r0.abs_moment if r0.abs_moment else math.inf,
        "energy_drift": _float_or_none(e_d),
        "energy_drift_rel": _float_or_none(e_rel),
    }


@dataclass
class TailInequalityReport:
    """Empirical constant for tail(2a) <= C a^{-2} Int[tail(a/2)^2 + e^{-a/4} tail(a/2)].

    C_emp(t) = tail(2a)(t) * a^2 / RHS(t) wherever RHS(t) > 0; the bound's
    constant is an unnamed absolute one, so only the observed values are
    reported, never a pass/fail verdict.
    """

    a: float
    inner_exponent: int
    times: list[float]
    lhs: list[float]
    rhs: list[float]
    C_values: list[float]
    max_C: float
    t_at_max: float

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "inner_exponent": self.inner_exponent,
            "max_C": _float_or_none(self.max_C),
            "t_at_max": self.t_at_max,
            "final_lhs": self.lhs[-1] if self.lhs else 0.0,
            "final_rhs": self.rhs[-1] if self.rhs else 0.0,
            "n_evaluations": len(self.C_values),
        }


def empirical_tail_inequality(
    records: list[DiagnosticsRecord], exponents, a: float
) -> TailInequalityReport:
    """Evaluate the tail-mass inequality along a run for threshold a.

    Needs recorded tails at both a/2 and 2a, i.e. a = 2 * 4^n with n and
    n+1 among the recorded exponents (the n = 0 slot records total mass,
    not a tail, so a = 2 is not servable from recorded data).
    """
    if a < 2.0:
        raise ValueError(f"threshold must satisfy a >= 2, got {a!r}")
    if len(records) < 2:
        raise ValueError("need at least two records to integrate in time")
    exponents = list(exponents)
    n_inner = round(math.log(a / 2.0) / LOG4)
    if not math.isclose(2.0 * 4.0**n_inner, a, rel_tol=1e-12) or n_inner < 1:
        raise ConfigError(
            f"threshold a={a!r} is not 2*4^n with n >= 1; recorded tails "
            f"cannot supply masses beyond a/2 and 2a"
        )
    if n_inner not in exponents or (n_inner + 1) not in exponents:
        raise ConfigError(
            f"records lack tail exponents {n_inner} and {n_inner + 1} "
            f"needed for thresholds a/2={a / 2} and 2a={2 * a}"
        )
    i_in, i_out = exponents.index(n_inner), exponents.index(n_inner + 1)
    ts = np.array([r.t for r in records])
    inner = np.array([r.tails[i_in] for r in records])
    lhs = np.array([r.tails[i_out] for r in records])
    integrand = inner**2 + math.exp(-a / 4.0) * inner
    rhs = np.concatenate(
        [[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(ts))]
    )
    C = np.full(len(ts), math.nan)
    ok = rhs > 0.0
    C[ok] = lhs[ok] * a**2 / rhs[ok]
    finite = np.where(ok)[0]
    if finite.size:
        k = finite[int(np.argmax(C[finite]))]
        max_C, t_at = float(C[k]), float(ts[k])
    else:
        max_C, t_at = 0.0, float(ts[0])
    return TailInequalityReport(
        a=float(a),
        inner_exponent=n_inner,
        times=ts.tolist(),
        lhs=lhs.tolist(),
        rhs=rhs.tolist(),
        C_values=[float(c) for c in C],
        max_C=max_C,
        t_at_max=t_at,
    )


def _monotone_envelope(d: np.ndarray) -> np.ndarray:
    return np.maximum.accumulate(d)


def fit_growth_exponent(records: list[DiagnosticsRecord]) -> tuple[float, float]:
    """(p, prefactor): least-squares fit envelope(d) ~ prefactor * (1+t)^p.

    The diameter series is first made monotone (running max), then the
    fit runs over the last decade of 1+t.  Requires >= 10 records
    spanning >= 1.5 decades of 1+t.
    """
    if len(records) < 10:
        raise ValueError(f"need at least 10 records, got {len(records)}")
    ts = np.array([r.t for r in records])
    d = np.array([r.diameter for r in records])
    span = (1.0 + ts[-1]) / (1.0 + ts[0])
    if span < 10.0**1.5:
        raise ValueError(
            f"records span a factor {span:.3g} in 1+t; need >= 10^1.5"
        )
    env = _monotone_envelope(d)
    sel = (1.0 + ts) >= (1.0 + ts[-1]) / 10.0
    if np.count_nonzero(sel) < 2:
        raise ValueError("fewer than 2 records in the last decade")
    if np.any(env[sel] <= 0.0):
        raise ValueError("diameter envelope must be positive to fit a power law")
    x = np.log1p(ts[sel])
    y = np.log(env[sel])
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(math.exp(intercept))


def growth_fit_report(records: list[DiagnosticsRecord]) -> dict:
    p, pref = fit_growth_exponent(records)
    ts = np.array([r.t for r in records])
    sel = (1.0 + ts) >= (1.0 + ts[-1]) / 10.0
    return {
        "exponent": p,
        "prefactor": pref,
        "window_t": [float(ts[sel][0]), float(ts[-1])],
        "n_points": int(np.count_nonzero(sel)),
    }


def choose_domination_L(
    c5: float, c4: float, t_ref: float, d_ref: float
) -> float:
    """Smallest L (at least marginally above 1/3) with 2 R_L(t_ref) >= d_ref.

    Inverts the quadratic phi(L); when the barrier's additive constant 4
    already covers d_ref any admissible L works and the returned L sits
    just above the critical value.
    """
    if t_ref <= 1.0:
        raise ValueError("reference time must exceed 1")
    lg = math.log(t_ref)
    phi_target = max((d_ref - 4.0) / (4.0 * t_ref ** (1.0 / 3.0) * lg * lg), 0.0)
    # the 1e-9 pad keeps domination strict at t_ref under rounding
    s = math.sqrt(phi_target * c5 ** (1.0 / 3.0)) * (1.0 + 1e-9) / 4.0
    return max(L_CRITICAL + c4 * LOG4 * s, L_CRITICAL + 1e-9)


def envelope_comparison(
    records: list[DiagnosticsRecord],
    c5: float,
    c4: float,
    L: float | None = None,
    t_ref: float = 20.0,
) -> dict:
    """Record d(t) vs 2 R_L(t) for t >= t_ref; informational, not pass/fail.

    With L omitted, the smallest admissible L is chosen whose barrier clears
    every windowed record, when the barrier family allows it at all.  Matching
    the diameter at a single reference time is not enough: a diameter can
    outgrow the barrier locally even when it loses asymptotically.
    """
    ts = np.array([r.t for r in records])
    d = np.array([r.diameter for r in records])
    sel = ts >= max(t_ref, 1.0)
    if not np.any(sel):
        raise ValueError(f"no records at or beyond t_ref={t_ref}")
    auto = L is None
    if auto:
        w = sel & (ts > 1.0)
        if np.any(w):
            lg = np.log(ts[w])
            need = (d[w] - 4.0) / (4.0 * np.cbrt(ts[w]) * lg * lg)
            i = int(np.argmax(need))
            L = choose_domination_L(c5, c4, float(ts[w][i]), float(d[w][i]))
        else:
            L = L_CRITICAL + 1e-9
    env = EnvelopeParams(c5=c5, c4=c4, L=float(L))
    barrier = 2.0 * envelope_R(env, ts[sel])
    dominated = d[sel] <= barrier
    first_violation = None
    if not np.all(dominated):
        first_violation = float(ts[sel][int(np.argmin(dominated))])
    return {
        "L": float(L),
        "L_auto_chosen": auto,
        "phi": phi_of_L(env),
        "c5": c5,
        "t_ref": float(ts[sel][0]),
        "n_compared": int(np.count_nonzero(sel)),
        "dominated_fraction": float(np.mean(dominated)),
        "holds_throughout": bool(np.all(dominated)),
        "first_violation_t": first_violation,
        "final_diameter": float(d[-1]),
        "final_barrier": float(barrier[-1]),
    }
