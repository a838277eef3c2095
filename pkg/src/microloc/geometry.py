"""Open circular cones and polynomially moderate radial weights.

A cone is the set {xi != 0 : angle(xi, axis) < aperture}; it never contains
the origin and is invariant under positive scaling.  Weights are radial
bracket powers <xi>^s with <xi> = sqrt(1 + |xi|^2), or a user-supplied
positive function tagged with the exponent of its bracket-power majorant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .validation import as_box, as_point, as_points, check_in_open, unit_direction


@dataclass(frozen=True)
class Cone:
    """Open circular cone given by a unit axis and a half-angle in (0, pi)."""

    axis: np.ndarray
    aperture: float

    def __post_init__(self):
        object.__setattr__(self, "axis", unit_direction(self.axis, "cone axis"))
        object.__setattr__(
            self, "aperture", check_in_open(self.aperture, 0.0, math.pi, "aperture")
        )

    @classmethod
    def from_degrees(cls, axis, aperture_deg: float) -> "Cone":
        return cls(axis, math.radians(float(aperture_deg)))

    @property
    def d(self) -> int:
        return self.axis.size

    @property
    def aperture_deg(self) -> float:
        return math.degrees(self.aperture)

    def contains(self, xi) -> np.ndarray | bool:
        """Strict membership test; vectorized over rows of an (n, d) array."""
        pts = np.asarray(xi, dtype=float)
        scalar = pts.ndim == 1
        pts = as_points(pts, self.d, "xi")
        r = np.linalg.norm(pts, axis=1)
        inside = (r > 0.0) & (pts @ self.axis > r * math.cos(self.aperture))
        return bool(inside[0]) if scalar else inside

    def to_json(self) -> dict:
        return {"axis": self.axis.tolist(), "aperture_deg": self.aperture_deg}

    @classmethod
    def from_json(cls, data: dict) -> "Cone":
        return cls.from_degrees(data["axis"], data["aperture_deg"])


def cone_contains(cone: Cone, xi) -> bool | np.ndarray:
    return cone.contains(xi)


def compactly_contained(inner: Cone, outer: Cone) -> bool:
    """True iff closure(inner) minus the origin lies inside the outer cone.

    For circular cones this reduces to the closed-form test
    angle(axis_in, axis_out) + aperture_in < aperture_out (strict).
    """
    if inner.d != outer.d:
        raise ValueError("cones must share a dimension")
    cosang = float(np.clip(inner.axis @ outer.axis, -1.0, 1.0))
    return math.acos(cosang) + inner.aperture < outer.aperture


@dataclass(frozen=True)
class Weight:
    """Positive radial weight on frequency space.

    kind "bracket_power" evaluates to <xi>^s.  kind "custom" wraps a
    callable; its `s` records the bracket-power exponent used as the
    default moderating partner in v-moderateness checks.
    """

    kind: str = "bracket_power"
    s: float = 0.0
    fn: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("bracket_power", "custom"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "custom" and self.fn is None:
            raise ValueError("custom weights need a callable")

    @classmethod
    def bracket_power(cls, s: float) -> "Weight":
        return cls("bracket_power", float(s))

    @classmethod
    def product(cls, *exponents: float) -> "Weight":
        """Product of bracket powers; collapses to a single exponent sum."""
        return cls.bracket_power(float(sum(exponents)))

    @classmethod
    def custom(cls, fn: Callable, moderating_exponent: float) -> "Weight":
        return cls("custom", float(moderating_exponent), fn)

    def __call__(self, xi) -> np.ndarray | float:
        pts = np.asarray(xi, dtype=float)
        scalar = pts.ndim <= 1
        if pts.ndim <= 1:
            pts = np.atleast_1d(pts)[None, :]  # one d-dimensional point
        if self.kind == "custom":
            vals = np.asarray(self.fn(pts), dtype=float)
        else:
            bracket = np.sqrt(1.0 + np.sum(pts * pts, axis=1))
            vals = bracket**self.s
        return float(vals[0]) if scalar else vals

    def moderating_partner(self) -> "Weight":
        return Weight.bracket_power(abs(self.s))

    def to_json(self) -> dict:
        if self.kind != "bracket_power":
            raise ValueError("only bracket_power weights serialize to JSON")
        return {"kind": "bracket_power", "s": self.s}

    @classmethod
    def from_json(cls, data: dict) -> "Weight":
        if data.get("kind") != "bracket_power":
            raise ValueError(f"unsupported weight kind {data.get('kind')!r}")
        return cls.bracket_power(data["s"])


def weight_eval(omega: Weight, xi) -> float:
    return float(omega(as_point(xi, name="xi")))


def check_moderate(omega: Weight, v: Weight, box, n: int, seed: int = 0) -> float:
    """Largest observed omega(xi+eta) / (omega(xi) v(eta)) over n^2 pairs.

    xi and eta are drawn uniformly from the sampling box with a seeded
    generator, so the result is deterministic.  For bracket powers with
    v = <.>^{|s|} the Peetre inequality bounds the result by 2^{|s|/2}.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    lo, hi = as_box(box, name="sampling box")
    rng = np.random.default_rng(seed)
    xi = rng.uniform(lo, hi, size=(n, lo.size))
    eta = rng.uniform(lo, hi, size=(n, lo.size))
    xi[0] = 0.0  # anchor at the origin, where the ratio is exactly 1
    eta[0] = 0.0
    pairs = xi[:, None, :] + eta[None, :, :]
    num = omega(pairs.reshape(-1, lo.size))
    den = omega(xi)[:, None] * v(eta)[None, :]
    return float(np.max(num.reshape(n, n) / den))
