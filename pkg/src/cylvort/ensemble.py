"""Vortex-blob ensembles and the functionals tracked along a run.

An ensemble is a finite set of blobs (position, circulation, core radius)
standing in for a vorticity distribution on the cylinder.  The conserved
functionals of the flow have exact discrete counterparts:

    mass      m = sum_j gamma_j
    h-center  h = sum_j x_j gamma_j            (unnormalized first moment)
    energy    e = sum_ij gamma_i gamma_j G_dij(z_i - z_j)

The energy double sum runs over ordered pairs and includes the diagonal,
with pair regularization d_ij = max(delta_i, delta_j) off-diagonal and the
blob's own core radius on the diagonal; self-terms are constants of the
motion, so including them keeps e conserved while pinning its absolute
value.  Tail diagnostics follow the convention that index 0 means total
mass and index n >= 1 means the mass beyond |x| > 4^n.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import SingularityError
from .kernels import TWO_PI, CylinderPoint, Displacement, stream_kernel

SNAPSHOT_MAGIC = b"VBLOBS01"


@dataclass(frozen=True)
class VortexBlob:
    """Single blob: center, circulation, core radius (delta >= 0)."""

    pos: CylinderPoint
    circulation: float
    core_radius: float

    def __post_init__(self):
        if not np.isfinite(self.circulation):
            raise ValueError(f"circulation must be finite, got {self.circulation!r}")
        if not (np.isfinite(self.core_radius) and self.core_radius >= 0.0):
            raise ValueError(f"core_radius must be >= 0, got {self.core_radius!r}")


class VorticityEnsemble:
    """Ordered collection of blobs; order is stable and meaningful.

    When nonneg_mode is set, every circulation must be >= 0 (the sign class
    the confinement statements apply to).  Arrays are read-only views;
    transforms return new ensembles.
    """

    def __init__(self, x, y, circulation, core_radius, nonneg_mode: bool = False):
        x = np.ascontiguousarray(x, dtype=np.float64)
        y = np.ascontiguousarray(y, dtype=np.float64)
        circulation = np.ascontiguousarray(circulation, dtype=np.float64)
        core_radius = np.ascontiguousarray(core_radius, dtype=np.float64)
        n = x.shape[0]
        if not (y.shape == circulation.shape == core_radius.shape == (n,) == x.shape):
            raise ValueError("x, y, circulation, core_radius must be equal-length 1-d")
        if not np.all(np.isfinite(x)):
            raise ValueError("blob x positions must be finite")
        if not np.all(np.isfinite(y)):
            raise ValueError("blob y positions must be finite")
        if not np.all(np.isfinite(circulation)):
            raise ValueError("circulations must be finite")
        if not np.all(np.isfinite(core_radius) & (core_radius >= 0.0)):
            raise ValueError("core radii must be finite and >= 0")
        if nonneg_mode and np.any(circulation < 0.0):
            raise ValueError("nonneg_mode ensemble has a negative circulation")
        y = np.mod(y, TWO_PI)
        y[y >= TWO_PI] = 0.0
        for arr in (x, y, circulation, core_radius):
            arr.setflags(write=False)
        self.x = x
        self.y = y
        self.circulation = circulation
        self.core_radius = core_radius
        self.nonneg_mode = bool(nonneg_mode)

    @classmethod
    def from_blobs(cls, blobs, nonneg_mode: bool = False) -> "VorticityEnsemble":
        blobs = list(blobs)
        return cls(
            np.array([b.pos.x for b in blobs]),
            np.array([b.pos.y for b in blobs]),
            np.array([b.circulation for b in blobs]),
            np.array([b.core_radius for b in blobs]),
            nonneg_mode=nonneg_mode,
        )

    @property
    def blobs(self) -> list[VortexBlob]:
        return [
            VortexBlob(CylinderPoint(xi, yi), gi, di)
            for xi, yi, gi, di in zip(self.x, self.y, self.circulation, self.core_radius)
        ]

    def __len__(self) -> int:
        return self.x.shape[0]

    def with_positions(self, x, y) -> "VorticityEnsemble":
        """Same blobs, new centers (used by the time stepper)."""
        return VorticityEnsemble(
            x, y, self.circulation, self.core_radius, nonneg_mode=self.nonneg_mode
        )


def total_mass(ens: VorticityEnsemble) -> float:
    """Sum of circulations, fixed summation order."""
    return float(np.sum(ens.circulation))


def horizontal_center(ens: VorticityEnsemble) -> float:
    """Unnormalized horizontal first moment sum_j x_j gamma_j."""
    return float(np.sum(ens.x * ens.circulation))


def abs_first_moment(ens: VorticityEnsemble) -> float:
    """sum_j |x_j| gamma_j; a confinement scale for nonneg ensembles."""
    return float(np.sum(np.abs(ens.x) * ens.circulation))


def recenter_to_zero(ens: VorticityEnsemble) -> VorticityEnsemble:
    """Shift x so the horizontal center vanishes. Requires nonzero mass."""
    m = total_mass(ens)
    if m == 0.0:
        raise ValueError("cannot recenter an ensemble with zero total mass")
    shift = horizontal_center(ens) / m
    return ens.with_positions(ens.x - shift, ens.y)


def support_diameter(ens: VorticityEnsemble) -> float:
    """Horizontal extent max x - min x over blobs with nonzero circulation."""
    active = ens.circulation != 0.0
    if not np.any(active):
        raise ValueError("support_diameter needs at least one nonzero circulation")
    xs = ens.x[active]
    return float(xs.max() - xs.min())


def tail_mass(ens: VorticityEnsemble, r: float) -> float:
    """Circulation strictly beyond |x| > r (both sides)."""
    if r < 0.0:
        raise ValueError(f"tail radius must be >= 0, got {r!r}")
    return float(np.sum(ens.circulation[np.abs(ens.x) > r]))


def tail_second_moment(ens: VorticityEnsemble, a: float, side: str = "right") -> float:
    """sum over x_j > a of (x_j - a)^2 gamma_j; side='left' mirrors x -> -x."""
    if side == "right":
        sel = ens.x > a
        excess = ens.x[sel] - a
    elif side == "left":
        sel = ens.x < -a
        excess = -ens.x[sel] - a
    else:
        raise ValueError(f"side must be 'right' or 'left', got {side!r}")
    return float(np.sum(excess * excess * ens.circulation[sel]))


def tail_profile(ens: VorticityEnsemble, exponents) -> list[float]:
    """Tail diagnostics f_n: f_0 = total mass, f_n = tail_mass(4^n) for n >= 1."""
    out = []
    for n in exponents:
        if n == 0:
            out.append(total_mass(ens))
        else:
            out.append(tail_mass(ens, 4.0**n))
    return out


def _pair_log_denominators(ens: VorticityEnsemble) -> np.ndarray:
    dx = ens.x[:, None] - ens.x[None, :]
    cy, sy = np.cos(ens.y), np.sin(ens.y)
    cdy = np.multiply.outer(cy, cy)
    cdy += np.multiply.outer(sy, sy)
    delta = np.maximum.outer(ens.core_radius, ens.core_radius)
    return np.cosh(dx) - cdy + 0.5 * delta * delta


def regularized_energy(ens: VorticityEnsemble) -> float:
    """Discrete interaction energy, ordered pairs, diagonal included."""
    if len(ens) == 0:
        return 0.0
    if np.any(ens.core_radius == 0.0):
        idx = int(np.argmin(ens.core_radius))
        raise SingularityError(
            f"regularized_energy undefined: blob {idx} has core_radius 0 "
            "(diagonal term is singular)"
        )
    den = _pair_log_denominators(ens)
    g = ens.circulation
    return float(np.sum(np.multiply.outer(g, g) * 0.5 * np.log(den)))


def stream_at(ens: VorticityEnsemble, z: CylinderPoint) -> float:
    """Stream function at z: sum_j gamma_j G_dj(z - z_j), source-blob radii."""
    total = 0.0
    for xi, yi, gi, di in zip(ens.x, ens.y, ens.circulation, ens.core_radius):
        total += gi * stream_kernel(Displacement(z.x - xi, z.y - yi), di)
    return total


@dataclass
class DiagnosticsRecord:
    """One row of run diagnostics; tails follows the config's exponent list."""

    t: float
    mass: float
    h_center: float
    energy: float
    abs_moment: float
    diameter: float
    tails: list[float] = field(default_factory=list)
    sup_u1: float = 0.0


def csv_header(exponents) -> list[str]:
    return [
        "t",
        "mass",
        "h_center",
        "energy",
        "abs_moment",
        "diameter",
        "sup_u1",
    ] + [f"f_{n}" for n in exponents]


def record_to_row(rec: DiagnosticsRecord) -> list[str]:
    vals = [rec.t, rec.mass, rec.h_center, rec.energy, rec.abs_moment, rec.diameter,
            rec.sup_u1] + list(rec.tails)
    # 17 significant digits round-trips any float64 exactly
    return [f"{v:.17g}" for v in vals]


def records_to_csv(path, records, exponents) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(csv_header(exponents))
        for rec in records:
            w.writerow(record_to_row(rec))


def records_from_csv(path) -> tuple[list[DiagnosticsRecord], list[int]]:
    """Read diagnostics rows; returns (records, tail exponent list)."""
    import csv

    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty diagnostics file")
    header = rows[0]
    base = ["t", "mass", "h_center", "energy", "abs_moment", "diameter", "sup_u1"]
    for col in base:
        if col not in header:
            raise ValueError(f"{path}: missing required column {col!r}")
    idx = {c: header.index(c) for c in base}
    tail_cols = [(i, c) for i, c in enumerate(header) if c.startswith("f_")]
    exponents = [int(c[2:]) for _, c in tail_cols]
    records = []
    for row in rows[1:]:
        if not row:
            continue
        records.append(
            DiagnosticsRecord(
                t=float(row[idx["t"]]),
                mass=float(row[idx["mass"]]),
                h_center=float(row[idx["h_center"]]),
                energy=float(row[idx["energy"]]),
                abs_moment=float(row[idx["abs_moment"]]),
                diameter=float(row[idx["diameter"]]),
                sup_u1=float(row[idx["sup_u1"]]),
                tails=[float(row[i]) for i, _ in tail_cols],
            )
        )
    return records, exponents


def save_snapshot(path, ens: VorticityEnsemble) -> None:
    """Binary blob state: magic, little-endian uint64 count, then
    (x, y, circulation, core_radius) float64 little-endian per blob."""
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<Q", len(ens)))
        data = np.column_stack([ens.x, ens.y, ens.circulation, ens.core_radius])
        fh.write(data.astype("<f8").tobytes(order="C"))


def load_snapshot(path, nonneg_mode: bool = False) -> VorticityEnsemble:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != SNAPSHOT_MAGIC:
            raise ValueError(f"{path}: bad snapshot magic {magic!r}")
        (n,) = struct.unpack("<Q", fh.read(8))
        data = np.frombuffer(fh.read(n * 4 * 8), dtype="<f8").reshape(n, 4)
    return VorticityEnsemble(
        data[:, 0], data[:, 1], data[:, 2], data[:, 3], nonneg_mode=nonneg_mode
    )
