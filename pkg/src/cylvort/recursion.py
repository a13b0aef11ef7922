"""Exact verifier for the recursive tail-mass confinement machinery.

The recursion acts on non-decreasing functions of time.  With constants
c1 > 0, c2 >= 2, c6 > 0 the level-n update is

    (M_n h)(t) = c2 * min( 4^{-2n} * Int_0^t h (h + exp(-4^n/2)) dtau,
                           4^{-(n+1)} ),

iterated from g_0 == c1.  Every g_n is then piecewise polynomial with a
constant tail, so the iteration is carried out exactly in coefficient
arithmetic: squaring doubles the degree per level, the cap crossing is a
polynomial root, and nothing is sampled.  Hitting times

    t_n = min { tau : g_n(tau) = c2 * 4^{-n} }       (t_0 = 0)

come out of the same representation.  Alongside the exact objects, the
module iterates the closed two-parameter majorant and minorant sequences
(b and c) and certifies the doubly-exponential envelope

    b_{n,j} <= c3 * 4^{-n - c4 * 2^j}   for n >= n0

with c3 = 4^{alpha + 2^{-j0}}, c4 = 2^{-j0} derived from alpha = log4 c2,
beta = log4(2 c2 c6).

Polynomial pieces are stored in the scaled local coordinate
u = (t - b_i) / (b_{i+1} - b_i) in [0, 1]; on short early intervals the
raw local coefficients of degree ~2^n polynomials would overflow, while
scaled coefficients stay bounded by the function values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import ResolutionError

DEFAULT_MAX_DEGREE = 4095  # supports 12 recursion levels (degree 2^n - 1)
UNDERFLOW_FLOOR = 1e-300  # below this, values are treated as exact zero

LOG4 = math.log(4.0)


def exp_neg_half_pow4(m: int) -> float:
    """exp(-4^m / 2); underflows to exact 0.0 for m >= 6 territory."""
    arg = -0.5 * 4.0**m
    if arg < -745.0:
        return 0.0
    return math.exp(arg)


@dataclass(frozen=True)
class RecursionParams:
    """Input constants and the envelope constants derived from them."""

    c1: float
    c2: float
    c6: float
    alpha: float = field(init=False)
    beta: float = field(init=False)
    j0: int = field(init=False)
    n0: int = field(init=False)
    c3: float = field(init=False)
    c4: float = field(init=False)

    def __post_init__(self):
        if not (math.isfinite(self.c1) and self.c1 > 0):
            raise ValueError(f"c1 must be positive, got {self.c1!r}")
        if not (math.isfinite(self.c2) and self.c2 >= 2.0):
            raise ValueError(f"c2 must be >= 2, got {self.c2!r}")
        if not (math.isfinite(self.c6) and self.c6 > 0):
            raise ValueError(f"c6 must be positive, got {self.c6!r}")
        alpha = math.log(self.c2) / LOG4
        beta = math.log(2.0 * self.c2 * self.c6) / LOG4
        j0 = 1
        while not (j0 >= alpha + 1.0 and 2.0 * j0 >= beta):
            j0 += 1
        n0 = 1
        while 2.0 * self.c2 * self.c6 * 4.0 ** (3 * n0) < 4.0:
            n0 += 1
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "j0", j0)
        object.__setattr__(self, "n0", n0)
        object.__setattr__(self, "c4", 2.0 ** (-j0))
        object.__setattr__(self, "c3", 4.0 ** (alpha + 2.0 ** (-j0)))

    def cap(self, n: int) -> float:
        return self.c2 * 4.0 ** (-n)


class PiecewiseFn:
    """Non-decreasing piecewise polynomial with a constant tail.

    breakpoints[0] == 0; piece i lives on [breakpoints[i], breakpoints[i+1])
    with ascending coefficients in the scaled local coordinate
    u = (t - b_i)/L_i; for t >= breakpoints[-1] the value is tail_constant.
    """

    def __init__(self, breakpoints, pieces, tail_constant: float):
        self.breakpoints = [float(b) for b in breakpoints]
        self.pieces = [np.asarray(c, dtype=float) for c in pieces]
        self.tail_constant = float(tail_constant)
        if not self.breakpoints or self.breakpoints[0] != 0.0:
            raise ValueError("breakpoints must start at 0.0")
        if len(self.pieces) != len(self.breakpoints) - 1:
            raise ValueError("need exactly one piece per bounded interval")
        if any(b >= c for b, c in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")

    @classmethod
    def constant(cls, value: float) -> "PiecewiseFn":
        return cls([0.0], [], value)

    @property
    def degree(self) -> int:
        return max((len(c) - 1 for c in self.pieces), default=0)

    def __call__(self, t):
        t_in = np.asarray(t, dtype=float)
        t_arr = np.atleast_1d(t_in)
        if np.any(t_arr < 0.0):
            raise ValueError("domain is t >= 0")
        out = np.full(t_arr.shape, self.tail_constant)
        bks = np.asarray(self.breakpoints)
        idx = np.searchsorted(bks, t_arr, side="right") - 1
        for i, coeffs in enumerate(self.pieces):
            sel = idx == i
            if np.any(sel):
                length = bks[i + 1] - bks[i]
                u = (t_arr[sel] - bks[i]) / length
                out[sel] = P.polyval(u, coeffs)
        return float(out[0]) if t_in.ndim == 0 else out

    def piece_end_value(self, i: int) -> float:
        return float(P.polyval(1.0, self.pieces[i]))

    def scale(self) -> float:
        return max(abs(self.tail_constant), 1e-300)

    def validate(self, rtol: float = 1e-12) -> None:
        """Contract check: continuity at breakpoints, non-decreasing, bounded."""
        s = self.scale()
        u = np.linspace(0.0, 1.0, 33)
        prev_end = None
        for i, coeffs in enumerate(self.pieces):
            vals = P.polyval(u, coeffs)
            if np.any(vals < -rtol * s):
                raise ValueError(f"piece {i} takes negative values")
            if np.any(np.diff(vals) < -rtol * s):
                raise ValueError(f"piece {i} is decreasing")
            if prev_end is not None and abs(vals[0] - prev_end) > rtol * s:
                raise ValueError(f"discontinuity at breakpoint {i}")
            prev_end = vals[-1]
        if prev_end is not None and abs(prev_end - self.tail_constant) > rtol * s:
            raise ValueError("last piece does not match the tail constant")


def _trimmed(coeffs: np.ndarray) -> np.ndarray:
    out = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    return out if out.size else np.zeros(1)


def _solve_increasing(coeffs: np.ndarray, level: float) -> float:
    """First u in [0, 1] with p(u) = level for non-decreasing p; bisection
    to machine interval width plus one Newton polish (relative 1e-12)."""
    deriv = P.polyder(coeffs)
    lo, hi = 0.0, 1.0
    flo = P.polyval(lo, coeffs) - level
    if flo >= 0.0:
        return 0.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if P.polyval(mid, coeffs) - level < 0.0:
            lo = mid
        else:
            hi = mid
    u = 0.5 * (lo + hi)
    slope = P.polyval(u, deriv)
    if slope > 0.0:
        u -= (P.polyval(u, coeffs) - level) / slope
    return min(max(u, 0.0), 1.0)


def apply_Mn(
    h: PiecewiseFn,
    n: int,
    params: RecursionParams,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> PiecewiseFn:
    """One exact recursion level: c2 * min(4^{-2n} Int h(h+E), cap_{n+1}).

    Raises ValueError if h violates the contract (negative or decreasing)
    and ResolutionError if the result would exceed max_degree.
    """
    h.validate()
    E = exp_neg_half_pow4(n)
    pref = params.c2 * 4.0 ** (-2 * n)
    cap = params.c2 * 4.0 ** (-(n + 1))
    # crossing when the raw integral reaches cap / (c2 * 4^{-2n}) = 4^{n-1}
    target = 4.0 ** (n - 1)

    bks = h.breakpoints
    new_pieces: list[np.ndarray] = []
    new_bks = [0.0]
    acc = 0.0  # integral accumulated through previous pieces
    for i, coeffs in enumerate(h.pieces):
        if 2 * (len(coeffs) - 1) + 1 > max_degree:
            raise ResolutionError(
                f"level {n}: degree {2 * (len(coeffs) - 1) + 1} exceeds cap "
                f"{max_degree}"
            )
        length = bks[i + 1] - bks[i]
        q = P.polyadd(P.polymul(coeffs, coeffs), E * coeffs)
        J = length * P.polyint(q)  # scaled-local antiderivative over the piece
        full = float(P.polyval(1.0, J))
        if acc + full >= target and full > 0.0:
            u_star = _solve_increasing(J, target - acc)
            if u_star <= 0.0:
                # crossing exactly at the left endpoint: previous pieces only
                return PiecewiseFn(new_bks, new_pieces, cap)
            t_star = bks[i] + u_star * length
            trunc = J * np.power(u_star, np.arange(len(J)))
            trunc[0] += acc
            new_pieces.append(_trimmed(pref * trunc))
            new_bks.append(t_star)
            return PiecewiseFn(new_bks, new_pieces, cap)
        out = J.copy()
        out[0] += acc
        new_pieces.append(_trimmed(pref * out))
        new_bks.append(bks[i + 1])
        acc += full
    # tail region: h is constant, the integral grows linearly
    C = h.tail_constant
    rate = C * C + E * C
    if rate <= 0.0:
        # h vanishes identically beyond the last breakpoint: no crossing ever
        return PiecewiseFn(new_bks, new_pieces, pref * acc)
    s_star = (target - acc) / rate
    if s_star <= 0.0:
        return PiecewiseFn(new_bks, new_pieces, cap)
    new_pieces.append(np.array([pref * acc, pref * rate * s_star]))
    new_bks.append(bks[-1] + s_star)
    return PiecewiseFn(new_bks, new_pieces, cap)


def compute_g_sequence(
    params: RecursionParams, levels: int, max_degree: int = DEFAULT_MAX_DEGREE
) -> list[PiecewiseFn]:
    """[g_0, ..., g_levels] computed exactly; g_0 == c1."""
    gs = [PiecewiseFn.constant(params.c1)]
    for n in range(levels):
        gs.append(apply_Mn(gs[-1], n, params, max_degree=max_degree))
    return gs


def hitting_time(g: PiecewiseFn, level: float) -> float:
    """First time g equals level; error if the level is never attained."""
    if not math.isfinite(level):
        raise ValueError("level must be finite")
    tol = 1e-12 * g.scale()
    first = g.pieces[0][0] if g.pieces else g.tail_constant
    if first >= level:
        if first - level <= tol:
            return 0.0
        raise ValueError(f"level {level!r} is below the initial value {first!r}")
    bks = g.breakpoints
    for i in range(len(g.pieces)):
        end_val = g.piece_end_value(i)
        if end_val >= level:
            length = bks[i + 1] - bks[i]
            u = _solve_increasing(g.pieces[i], level)
            t = bks[i] + u * length
            # snap to the breakpoint when the root solve lands within ulps
            if abs(t - bks[i + 1]) <= 8.0 * np.finfo(float).eps * abs(bks[i + 1]):
                return bks[i + 1]
            return t
    if abs(g.tail_constant - level) <= tol:
        return bks[-1]
    raise ValueError(f"level {level!r} exceeds the terminal value "
                     f"{g.tail_constant!r}; never attained")


def hitting_times(params: RecursionParams, gs: list[PiecewiseFn]) -> list[float]:
    """[t_0 = 0, t_1, ..., t_N] with t_n the first time g_n reaches c2 4^-n."""
    out = [0.0]
    for nn in range(1, len(gs)):
        out.append(hitting_time(gs[nn], params.cap(nn)))
    return out


def compute_b_sequence(params: RecursionParams, n: int, j_max: int) -> list[float]:
    """Majorant recursion b_{n,0..j_max}; underflow to exact 0 is permitted."""
    if n < 1:
        raise ValueError("b-sequence is defined for n >= 1")
    b = [params.c2 * 4.0 ** (-n)]
    for j in range(j_max):
        grow = (
            params.c2
            * 4.0 ** (-2 * (n + j))
            * b[-1]
            * (b[-1] + exp_neg_half_pow4(n + j))
            * params.c6
            * 4.0 ** (3 * n)
        )
        b.append(min(grow, params.c2 * 4.0 ** (-(n + j + 1))))
    return b


def compute_c_sequence(params: RecursionParams, n: int, j_max: int) -> list[float]:
    """Minorant-free quadratic comparison sequence c_{n,0..j_max}."""
    if n < 1:
        raise ValueError("c-sequence is defined for n >= 1")
    c = [params.c2 * 4.0 ** (-n)]
    for j in range(j_max):
        grow = (
            2.0
            * params.c2
            * 4.0 ** (-2 * (n + j))
            * c[-1]
            * c[-1]
            * params.c6
            * 4.0 ** (3 * n)
        )
        c.append(min(grow, params.c2 * 4.0 ** (-(n + j + 1))))
    return c


def kur_bound(params: RecursionParams, n: int, j: int) -> float:
    """Envelope c3 * 4^{-n - c4 2^j}, arranged so the j = 0 ratio is exact:
    c3 * 4^{-n-c4} == c2 * 4^{-n} identically."""
    return params.c2 * 4.0 ** (-n) * 4.0 ** (-params.c4 * (2.0**j - 1.0))


def check_b_floor(params: RecursionParams, n: int, b: list[float]):
    """Lower bound b_{n,j} >= exp(-4^{n+j}/2) for n >= n0, in log space.

    Returns (violations, suspended): comparisons where b has underflowed
    below UNDERFLOW_FLOOR are suspended rather than judged.
    """
    if n < params.n0:
        raise ValueError(f"floor check requires n >= n0 = {params.n0}")
    violations, suspended = [], []
    for j, bv in enumerate(b):
        if bv < UNDERFLOW_FLOOR:
            suspended.append(j)
        elif math.log(bv) < -0.5 * 4.0 ** (n + j):
            violations.append(j)
    return violations, suspended


@dataclass
class BoundCertificate:
    """Outcome of checking b_{n,j} <= c3 4^{-n-c4 2^j} over a grid."""

    params: RecursionParams
    n_values: list[int]
    j_values: list[int]
    max_ratio: float
    witness_n: int
    witness_j: int
    witness_b: float
    witness_bound: float
    suspended: list[tuple[int, int]]
    floor_violations: list[tuple[int, int]]
    passed: bool

    def to_dict(self) -> dict:
        p = self.params
        return {
            "params": {"c1": p.c1, "c2": p.c2, "c6": p.c6},
            "derived": {
                "alpha": p.alpha, "beta": p.beta, "j0": p.j0, "n0": p.n0,
                "c3": p.c3, "c4": p.c4,
            },
            "n_values": self.n_values,
            "j_values": self.j_values,
            "max_ratio": self.max_ratio,
            "witness": {
                "n": self.witness_n, "j": self.witness_j,
                "b": self.witness_b, "bound": self.witness_bound,
            },
            "suspended_underflow": [list(s) for s in self.suspended],
            "floor_violations": [list(s) for s in self.floor_violations],
            "passed": self.passed,
        }


def verify_kur_bound(
    params: RecursionParams, n_values, j_values
) -> BoundCertificate:
    """Certify the doubly-exponential majorant over n_values x j_values.

    n_values must lie in [n0, inf); entries whose b has underflowed below
    UNDERFLOW_FLOOR are recorded as suspended and contribute ratio 0.
    """
    n_values = sorted(int(n) for n in n_values)
    j_values = sorted(int(j) for j in j_values)
    if not n_values or not j_values:
        raise ValueError("need at least one n and one j")
    if n_values[0] < params.n0:
        raise ValueError(
            f"bound holds for n >= n0 = {params.n0}; requested n = {n_values[0]}"
        )
    if j_values[0] < 0:
        raise ValueError("j must be >= 0")
    max_ratio = -math.inf
    wit = (n_values[0], j_values[0], 0.0, 0.0)
    suspended: list[tuple[int, int]] = []
    floor_viol: list[tuple[int, int]] = []
    for n in n_values:
        b = compute_b_sequence(params, n, j_values[-1])
        viol, susp = check_b_floor(params, n, b)
        floor_viol.extend((n, j) for j in viol if j in j_values)
        for j in j_values:
            bound = kur_bound(params, n, j)
            if b[j] < UNDERFLOW_FLOOR:
                suspended.append((n, j))
                ratio = 0.0
            elif bound == 0.0:
                ratio = math.inf
            else:
                ratio = b[j] / bound
            if ratio > max_ratio:
                max_ratio = ratio
                wit = (n, j, b[j], bound)
    return BoundCertificate(
        params=params,
        n_values=n_values,
        j_values=j_values,
        max_ratio=max_ratio,
        witness_n=wit[0],
        witness_j=wit[1],
        witness_b=wit[2],
        witness_bound=wit[3],
        suspended=suspended,
        floor_violations=floor_viol,
        passed=(max_ratio <= 1.0) and not floor_viol,
    )


@dataclass
class ConsistencyReport:
    """Dominance of the exact recursion by the closed majorant at t_n."""

    n: int
    t_n: float
    a_values: list[float]
    b_values: list[float]
    max_excess: float
    passed: bool


def consistency_g_vs_b(
    params: RecursionParams,
    n: int,
    j_max: int,
    gs: list[PiecewiseFn] | None = None,
    rtol: float = 1e-9,
) -> ConsistencyReport:
    """Check a_{n,j} := g_{n+j}(t_n) <= b_{n,j} (1 + rtol) for j <= j_max."""
    if n < 1:
        raise ValueError("consistency check needs n >= 1")
    if gs is None or len(gs) < n + j_max + 1:
        gs = compute_g_sequence(params, n + j_max)
    t_n = hitting_time(gs[n], params.cap(n))
    a = [float(gs[n + j](t_n)) for j in range(j_max + 1)]
    b = compute_b_sequence(params, n, j_max)
    excess = 0.0
    ok = True
    for av, bv in zip(a, b):
        if bv > 0.0:
            excess = max(excess, av / bv - 1.0)
            if av > bv * (1.0 + rtol):
                ok = False
        elif av > 0.0:
            excess = math.inf
            ok = False
    return ConsistencyReport(
        n=n, t_n=t_n, a_values=a, b_values=b, max_excess=excess, passed=ok
    )
