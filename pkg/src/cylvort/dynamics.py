"""Blob dynamics: induced velocities, time stepping, diagnostics runs.

Every blob moves in the regularized velocity field of the others,

    dz_i/dt = sum_{j != i} gamma_j k_{delta_j}(z_i - z_j),

evaluated by direct O(N^2) summation.  The per-target sums use a fixed
pairwise reduction order, so repeat runs are bit-identical.  The pairwise
evaluation computes sin/cos of y-differences by addition formulas of
per-particle values (periodicity is then automatic) and cosh/sinh of
x-differences directly; |dx| is clamped at 700, which perturbs the kernel
by less than e^-700 and keeps intermediates finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import ensemble as ens_mod
from .ensemble import VorticityEnsemble
from .errors import SimulationAbort, SingularityError
from .kernels import TWO_PI, CylinderPoint, Velocity2

_DX_CLAMP = 700.0

INTEGRATORS = ("rk4", "rk2")


@dataclass(frozen=True)
class ProbeSpec:
    """Rectangular probe grid for velocity diagnostics.

    num_y >= 16 y-samples per probe abscissa; the y grid is uniform on
    [0, 2*pi).  Avoid placing probe abscissas exactly on zero-core blobs.
    """

    x_min: float = -8.0
    x_max: float = 8.0
    num_x: int = 37
    num_y: int = 24

    def __post_init__(self):
        if not (self.x_min <= self.x_max):
            raise ValueError("probe needs x_min <= x_max")
        if self.num_x < 1:
            raise ValueError("probe needs num_x >= 1")
        if self.num_y < 16:
            raise ValueError("probe needs num_y >= 16")

    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.num_x)

    def ys(self) -> np.ndarray:
        return np.linspace(0.0, TWO_PI, self.num_y, endpoint=False)


@dataclass(frozen=True)
class SimConfig:
    """Run parameters; all randomness flows through the single seed."""

    dt: float
    t_end: float
    output_every: int = 1
    integrator: str = "rk4"
    tail_exponents: tuple = (0, 1, 2, 3, 4, 5, 6)
    seed: int = 0
    sup_u1_probe: ProbeSpec = field(default_factory=ProbeSpec)

    def __post_init__(self):
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if not (self.t_end >= 0.0 and math.isfinite(self.t_end)):
            raise ValueError(f"t_end must be >= 0, got {self.t_end!r}")
        if self.output_every < 1:
            raise ValueError("output_every must be >= 1")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}")
        exps = tuple(int(n) for n in self.tail_exponents)
        if any(n < 0 for n in exps):
            raise ValueError("tail exponents must be >= 0")
        if sorted(set(exps)) != list(exps):
            raise ValueError("tail exponents must be strictly increasing")
        object.__setattr__(self, "tail_exponents", exps)


def _pairwise_velocity(tx, ty, sx, sy, gamma, core_radius, exclude=None):
    """Velocities at targets (tx, ty) induced by the source blobs.

    exclude='diag' masks i == j (targets are the sources); an integer
    masks that source for every target.  Returns (u1, u2) arrays.
    """
    dx = tx[:, None] - sx[None, :]
    np.clip(dx, -_DX_CLAMP, _DX_CLAMP, out=dx)
    ch = np.cosh(dx)
    sh = np.sinh(dx)
    cts, sts = np.cos(ty), np.sin(ty)
    css, sss = np.cos(sy), np.sin(sy)
    cdy = np.multiply.outer(cts, css)
    cdy += np.multiply.outer(sts, sss)
    sdy = np.multiply.outer(sts, css)
    sdy -= np.multiply.outer(cts, sss)
    den = ch - cdy
    den += (0.5 * core_radius * core_radius)[None, :]
    if exclude == "diag":
        np.fill_diagonal(den, np.inf)
    elif exclude is not None:
        den[:, exclude] = np.inf
    if np.any(den <= 0.0):
        i, j = np.argwhere(den <= 0.0)[0]
        raise SingularityError(
            f"velocity evaluation hit the unregularized singularity: target {i} "
            f"coincides with source blob {j} (core_radius 0)"
        )
    w = gamma[None, :] / (2.0 * den)
    u1 = -np.einsum("ij,ij->i", sdy, w)
    u2 = np.einsum("ij,ij->i", sh, w)
    return u1, u2


def _blob_velocities(ens: VorticityEnsemble, x, y):
    return _pairwise_velocity(
        x, y, x, y, ens.circulation, ens.core_radius, exclude="diag"
    )


def velocity_at(
    ens: VorticityEnsemble, z: CylinderPoint, exclude: int | None = None
) -> Velocity2:
    """Induced velocity at a point, optionally excluding one source blob."""
    if exclude is not None and not (0 <= exclude < len(ens)):
        raise IndexError(f"exclude index {exclude} out of range")
    u1, u2 = _pairwise_velocity(
        np.array([z.x]),
        np.array([z.y]),
        ens.x,
        ens.y,
        ens.circulation,
        ens.core_radius,
        exclude=exclude,
    )
    return Velocity2(float(u1[0]), float(u2[0]))


def self_induced_velocities(ens: VorticityEnsemble) -> list[Velocity2]:
    """Velocity of each blob in the field of the others, fixed order."""
    u1, u2 = _blob_velocities(ens, ens.x, ens.y)
    return [Velocity2(float(a), float(b)) for a, b in zip(u1, u2)]


def step(ens: VorticityEnsemble, dt: float, integrator: str = "rk4") -> VorticityEnsemble:
    """Advance all blob positions simultaneously by one step of size dt.

    Circulations and core radii are untouched; y is wrapped to [0, 2*pi)
    after the full step only, never between stages.
    """
    if len(ens) == 0:
        raise ValueError("cannot step an empty ensemble")
    if integrator not in INTEGRATORS:
        raise ValueError(f"integrator must be one of {INTEGRATORS}")
    x0, y0 = ens.x, ens.y
    if integrator == "rk4":
        k1x, k1y = _blob_velocities(ens, x0, y0)
        k2x, k2y = _blob_velocities(ens, x0 + 0.5 * dt * k1x, y0 + 0.5 * dt * k1y)
        k3x, k3y = _blob_velocities(ens, x0 + 0.5 * dt * k2x, y0 + 0.5 * dt * k2y)
        k4x, k4y = _blob_velocities(ens, x0 + dt * k3x, y0 + dt * k3y)
        x1 = x0 + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y1 = y0 + (dt / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    else:
        k1x, k1y = _blob_velocities(ens, x0, y0)
        kmx, kmy = _blob_velocities(ens, x0 + 0.5 * dt * k1x, y0 + 0.5 * dt * k1y)
        x1 = x0 + dt * kmx
        y1 = y0 + dt * kmy
    return ens.with_positions(x1, y1)


def sup_u1_profile(ens: VorticityEnsemble, probe: ProbeSpec):
    """Max |u1| over the y-sample at each probe abscissa plus the global max.

    Returns (list of (x, max|u1|), global_max).
    """
    xs = probe.xs()
    ys = probe.ys()
    tx = np.repeat(xs, ys.size)
    ty = np.tile(ys, xs.size)
    u1, _ = _pairwise_velocity(tx, ty, ens.x, ens.y, ens.circulation, ens.core_radius)
    per_x = np.abs(u1).reshape(xs.size, ys.size).max(axis=1)
    profile = [(float(a), float(b)) for a, b in zip(xs, per_x)]
    return profile, float(per_x.max()) if per_x.size else 0.0


def _diagnostics(ens: VorticityEnsemble, t: float, cfg: SimConfig):
    # energy is undefined (diagonal-singular) for zero core radii; record nan
    if np.any(ens.core_radius == 0.0):
        energy = math.nan
    else:
        energy = ens_mod.regularized_energy(ens)
    _, sup_u1 = sup_u1_profile(ens, cfg.sup_u1_probe)
    return ens_mod.DiagnosticsRecord(
        t=t,
        mass=ens_mod.total_mass(ens),
        h_center=ens_mod.horizontal_center(ens),
        energy=energy,
        abs_moment=ens_mod.abs_first_moment(ens),
        diameter=ens_mod.support_diameter(ens),
        tails=ens_mod.tail_profile(ens, cfg.tail_exponents),
        sup_u1=sup_u1,
    )


def _step_plan(dt: float, t_end: float):
    """Number of full dt steps plus an optional short closing step."""
    if t_end == 0.0:
        return 0, 0.0
    ratio = t_end / dt
    n_round = round(ratio)
    if n_round > 0 and abs(n_round * dt - t_end) <= 1e-9 * max(dt, t_end):
        return int(n_round), 0.0
    n_full = int(math.floor(ratio))
    return n_full, t_end - n_full * dt


def simulate(ens: VorticityEnsemble, cfg: SimConfig, on_record=None):
    """Run the flow from t=0 to t_end recording diagnostics.

    Records are taken at t=0, after every output_every-th step, and at
    t_end; record times are strictly increasing.  on_record(record, state)
    is invoked as each record is produced, so partial output survives an
    aborted run; the abort itself is re-raised as SimulationAbort carrying
    the records gathered so far.
    """
    if len(ens) == 0:
        raise ValueError("cannot simulate an empty ensemble")
    records: list = []

    def emit(rec, state):
        records.append(rec)
        if on_record is not None:
            on_record(rec, state)

    n_full, closing = _step_plan(cfg.dt, cfg.t_end)
    emit(_diagnostics(ens, 0.0, cfg), ens)
    state = ens
    try:
        for k in range(1, n_full + 1):
            state = step(state, cfg.dt, cfg.integrator)
            t = k * cfg.dt
            is_last = k == n_full and closing == 0.0
            if is_last:
                emit(_diagnostics(state, cfg.t_end, cfg), state)
            elif k % cfg.output_every == 0:
                emit(_diagnostics(state, t, cfg), state)
        if closing > 0.0:
            state = step(state, closing, cfg.integrator)
            emit(_diagnostics(state, cfg.t_end, cfg), state)
    except SingularityError as exc:
        raise SimulationAbort(
            f"run aborted at t ~ {len(records) and records[-1].t}: {exc}",
            records=records,
        ) from exc
    return records, state
