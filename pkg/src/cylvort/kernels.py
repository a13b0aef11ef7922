"""Geometry and singular integral kernels for the infinite cylinder R x T.

The surface is parameterized by (x, y) with x in R and y in [0, 2*pi).
A point vortex at the origin induces the velocity field

    k(dx, dy) = (-sin dy, sinh dx) / (2 (cosh dx - cos dy)),

which is the perpendicular gradient of the stream kernel

    G(dx, dy) = (1/2) log(cosh dx - cos dy).

Core radius delta > 0 regularizes both by adding delta^2/2 to the
denominator / log argument.  All math is 64-bit; evaluation exactly on
an unregularized singularity raises SingularityError rather than
returning inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import SingularityError

TWO_PI = 2.0 * math.pi


def normalize_y(y: float) -> float:
    """Map y to its representative in [0, 2*pi). Idempotent."""
    if not math.isfinite(y):
        raise ValueError(f"y must be finite, got {y!r}")
    out = y % TWO_PI
    # float mod can return TWO_PI itself when y is a tiny negative number
    if out >= TWO_PI:
        out -= TWO_PI
    return out


def canonical_dy(dy: float) -> float:
    """Map a vertical displacement to its representative in [-pi, pi)."""
    if not math.isfinite(dy):
        raise ValueError(f"dy must be finite, got {dy!r}")
    out = (dy + math.pi) % TWO_PI - math.pi
    if out >= math.pi:
        out -= TWO_PI
    return out


@dataclass(frozen=True)
class CylinderPoint:
    """Point on the cylinder; y is normalized to [0, 2*pi) on construction."""

    x: float
    y: float

    def __post_init__(self):
        if not math.isfinite(self.x):
            raise ValueError(f"x must be finite, got {self.x!r}")
        object.__setattr__(self, "y", normalize_y(self.y))


@dataclass(frozen=True)
class Displacement:
    """Difference of two cylinder points; dy is canonical in [-pi, pi)."""

    dx: float
    dy: float

    def __post_init__(self):
        if not math.isfinite(self.dx):
            raise ValueError(f"dx must be finite, got {self.dx!r}")
        object.__setattr__(self, "dy", canonical_dy(self.dy))

    @classmethod
    def between(cls, p: CylinderPoint, q: CylinderPoint) -> "Displacement":
        """Displacement p - q."""
        return cls(p.x - q.x, p.y - q.y)

    def __neg__(self) -> "Displacement":
        return Displacement(-self.dx, -self.dy)


@dataclass(frozen=True)
class Velocity2:
    """Velocity vector (u1, u2) = (horizontal, vertical)."""

    u1: float
    u2: float

    def __neg__(self) -> "Velocity2":
        return Velocity2(-self.u1, -self.u2)

    def norm(self) -> float:
        return math.hypot(self.u1, self.u2)


def _denominator(d: Displacement, delta: float) -> float:
    if delta < 0.0:
        raise ValueError(f"core radius delta must be >= 0, got {delta!r}")
    den = math.cosh(d.dx) - math.cos(d.dy) + 0.5 * delta * delta
    if den <= 0.0:
        raise SingularityError(
            f"kernel evaluated at singular displacement ({d.dx!r}, {d.dy!r}) "
            f"with delta={delta!r}"
        )
    return den


def biot_savart_kernel(d: Displacement) -> Velocity2:
    """Velocity induced at displacement d by a unit vortex. Odd in d."""
    den = _denominator(d, 0.0)
    return Velocity2(-math.sin(d.dy) / (2.0 * den), math.sinh(d.dx) / (2.0 * den))


def regularized_kernel(d: Displacement, delta: float) -> Velocity2:
    """Blob-regularized kernel; equals biot_savart_kernel when delta = 0.

    Value at d = 0 with delta > 0 is exactly (0, 0).
    """
    den = _denominator(d, delta)
    return Velocity2(-math.sin(d.dy) / (2.0 * den), math.sinh(d.dx) / (2.0 * den))


def stream_kernel(d: Displacement, delta: float = 0.0) -> float:
    """Stream function of a unit vortex: (1/2) log(cosh dx - cos dy + delta^2/2).

    Even in d.  Diverges like log|d| as d -> 0 when delta = 0 and grows
    like |dx|/2 as |dx| -> infinity.
    """
    den = _denominator(d, delta)
    return 0.5 * math.log(den)


def k1_majorant(dx: float) -> float:
    """Decay envelope (1 + |dx|) exp(-|dx|) for the horizontal kernel component."""
    a = abs(dx)
    return (1.0 + a) * math.exp(-a)
