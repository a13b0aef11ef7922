"""Initial-condition builders: patches, clouds, and the translating pair.

All builders are deterministic given the ScenarioSpec (randomness only
enters random_cloud, through its seed) and the default geometries keep the
initial support inside [-1, 1] x T.  Nonnegative scenarios are
recentered so the circulation-weighted horizontal center sits exactly
at 0, the normalization the confinement diagnostics assume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensemble import VorticityEnsemble, recenter_to_zero
from .errors import ConfigError

SCENARIO_KINDS = ("disc_patch", "two_patches", "random_cloud", "vortex_pair")


@dataclass(frozen=True)
class ScenarioSpec:
    """Geometry and strength parameters for an initial condition.

    circulation_scale is the vorticity amplitude for patches (circulation
    per unit area), the total circulation for random_cloud, and the
    per-blob circulation for vortex_pair.  separation is the distance
    between the two patch centers / the two pair blobs.
    """

    kind: str
    blob_count: int = 500
    delta: float = 0.05
    circulation_scale: float = 1.0
    nonneg: bool = True
    seed: int = 0
    radius: float = 0.5
    center: tuple[float, float] = (0.0, math.pi)
    separation: float = 1.0

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ConfigError(
                f"unknown scenario kind {self.kind!r}; "
                f"expected one of {', '.join(SCENARIO_KINDS)}"
            )
        if self.blob_count < 1:
            raise ConfigError(f"blob_count must be >= 1, got {self.blob_count}")
        if not math.isfinite(self.delta) or self.delta < 0.0:
            raise ConfigError(f"delta must be >= 0, got {self.delta!r}")
        if self.delta == 0.0 and self.kind != "vortex_pair":
            raise ConfigError(
                "delta = 0 evolves bare point vortices and is allowed only "
                "for vortex_pair"
            )
        if not (0.0 < self.radius < math.pi):
            raise ConfigError(
                f"radius must lie in (0, pi) to fit the strip, got {self.radius!r}"
            )
        if not math.isfinite(self.separation) or self.separation <= 0.0:
            raise ConfigError(f"separation must be > 0, got {self.separation!r}")
        if not math.isfinite(self.circulation_scale) or self.circulation_scale == 0.0:
            raise ConfigError(
                f"circulation_scale must be finite and nonzero, "
                f"got {self.circulation_scale!r}"
            )
        if self.nonneg and self.circulation_scale < 0.0:
            raise ConfigError("nonneg scenarios need circulation_scale > 0")


def _disc_lattice(radius: float, blob_count: int, center: tuple[float, float]):
    """Cell-centered square lattice clipped to the disc; cell side
    h = r sqrt(pi / blob_count) makes the inside count come out near
    blob_count and the per-cell area h^2 tile the disc."""
    h = radius * math.sqrt(math.pi / blob_count)
    m = int(math.ceil(radius / h)) + 1
    offs = (np.arange(-m, m) + 0.5) * h
    gx, gy = np.meshgrid(offs, offs, indexing="ij")
    keep = gx**2 + gy**2 <= radius**2
    return center[0] + gx[keep], center[1] + gy[keep], h * h


def _build_disc(spec: ScenarioSpec) -> VorticityEnsemble:
    x, y, cell = _disc_lattice(spec.radius, spec.blob_count, spec.center)
    gamma = np.full(x.size, cell * spec.circulation_scale)
    return VorticityEnsemble(
        x, y, gamma, np.full(x.size, spec.delta), nonneg_mode=spec.nonneg
    )


def _build_two_patches(spec: ScenarioSpec) -> VorticityEnsemble:
    half = 0.5 * spec.separation
    if half <= spec.radius:
        raise ConfigError(
            f"patches overlap: separation/2 = {half} must exceed "
            f"radius = {spec.radius}"
        )
    n_each = max(spec.blob_count // 2, 1)
    cx, cy = spec.center
    xs, ys = [], []
    for sign in (-1.0, 1.0):
        x, y, cell = _disc_lattice(spec.radius, n_each, (cx + sign * half, cy))
        xs.append(x)
        ys.append(y)
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    gamma = np.full(x.size, cell * spec.circulation_scale)
    return VorticityEnsemble(
        x, y, gamma, np.full(x.size, spec.delta), nonneg_mode=spec.nonneg
    )


def _build_random_cloud(spec: ScenarioSpec) -> VorticityEnsemble:
    rng = np.random.default_rng(spec.seed)
    n = spec.blob_count
    x = rng.uniform(-1.0, 1.0, size=n)
    y = rng.uniform(0.0, 2.0 * math.pi, size=n)
    gamma = np.full(n, spec.circulation_scale / n)
    return VorticityEnsemble(
        x, y, gamma, np.full(n, spec.delta), nonneg_mode=spec.nonneg
    )


def _build_vortex_pair(spec: ScenarioSpec) -> VorticityEnsemble:
    a = 0.5 * spec.separation
    _, cy = spec.center
    x = np.array([-a, a])
    y = np.array([cy, cy])
    gamma = np.full(2, spec.circulation_scale)
    return VorticityEnsemble(
        x, y, gamma, np.full(2, spec.delta), nonneg_mode=spec.nonneg
    )


_BUILDERS = {
    "disc_patch": _build_disc,
    "two_patches": _build_two_patches,
    "random_cloud": _build_random_cloud,
    "vortex_pair": _build_vortex_pair,
}


def build_scenario(spec: ScenarioSpec) -> VorticityEnsemble:
    """Construct the initial ensemble; deterministic for a fixed spec."""
    ens = _BUILDERS[spec.kind](spec)
    if spec.nonneg and spec.kind != "vortex_pair":
        ens = recenter_to_zero(ens)
    return ens
