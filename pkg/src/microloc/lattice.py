"""Full-rank lattices, admissible lattice pairs, cells, and cone enumeration.

A lattice is offset + {t1 e1 + ... + td ed : t integer}; the basis vectors
are the rows of `basis`.  Enumeration inside cone shells brackets the shell
region by an integer box in lattice coordinates and filters, so no point is
missed and the cost is proportional to the bounding-box volume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import BudgetExceeded, SingularBasis
from .geometry import Cone
from .validation import as_float_array, as_point

DEFAULT_CELL_BUDGET = 10**8

_FACE_TOL = 1e-12
_PAIR_TOL = 1e-10


@dataclass(frozen=True)
class Lattice:
    basis: np.ndarray  # (d, d), rows are the basis vectors e_1 .. e_d
    offset: np.ndarray  # (d,)

    @property
    def d(self) -> int:
        return self.basis.shape[0]

    @cached_property
    def cell_volume(self) -> float:
        """Volume of any fundamental cell, |det(basis)|."""
        return abs(float(np.linalg.det(self.basis)))

    @cached_property
    def _inv_basis(self) -> np.ndarray:
        return np.linalg.inv(self.basis)

    @cached_property
    def min_spacing(self) -> float:
        """Shortest basis-vector norm (used to scale shell radii)."""
        return float(np.min(np.linalg.norm(self.basis, axis=1)))

    def point(self, t) -> np.ndarray:
        return self.offset + np.asarray(t, dtype=float) @ self.basis

    def points(self, ts: np.ndarray) -> np.ndarray:
        return self.offset + np.asarray(ts, dtype=float) @ self.basis

    def to_lattice_coords(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.offset) @ self._inv_basis

    @property
    def is_diagonal(self) -> bool:
        return bool(np.all(self.basis == np.diag(np.diagonal(self.basis))))

    def to_json(self) -> dict:
        return {"basis": self.basis.tolist(), "offset": self.offset.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "Lattice":
        return make_lattice(data["basis"], data.get("offset"))


def make_lattice(basis, offset=None) -> Lattice:
    """Build a lattice from d basis vectors and an optional offset.

    Raises SingularBasis when |det| <= 1e-12 * (max vector norm)^d, i.e.
    when the vectors are linearly dependent at working precision.
    """
    b = as_float_array(basis, "basis")
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError(f"basis must be a square (d, d) array, got shape {b.shape}")
    d = b.shape[0]
    scale = float(np.max(np.linalg.norm(b, axis=1)))
    det = abs(float(np.linalg.det(b)))
    if scale == 0.0 or det <= 1e-12 * scale**d:
        raise SingularBasis(f"basis vectors are linearly dependent (|det| = {det:g})")
    off = np.zeros(d) if offset is None else as_point(offset, d, "offset")
    b = b.copy()
    b.setflags(write=False)
    off.setflags(write=False)
    return Lattice(b, off)


def scaled_integer_lattice(step: float, d: int, offset=None) -> Lattice:
    """Convenience constructor for step * Z^d."""
    return make_lattice(np.eye(d) * float(step), offset)


@dataclass(frozen=True)
class Parallelepiped:
    """Fundamental cell of a lattice anchored at a lattice point."""

    lattice: Lattice
    anchor_coords: np.ndarray  # (d,) integers

    @property
    def anchor(self) -> np.ndarray:
        return self.lattice.point(self.anchor_coords)

    @property
    def edges(self) -> np.ndarray:
        return self.lattice.basis

    @property
    def volume(self) -> float:
        return self.lattice.cell_volume

    def vertices(self) -> np.ndarray:
        d = self.lattice.d
        corners = np.array(np.meshgrid(*([[0, 1]] * d), indexing="ij")).reshape(d, -1).T
        return self.lattice.points(self.anchor_coords + corners)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        v = self.vertices()
        return v.min(axis=0), v.max(axis=0)

    def contains(self, x, closed: bool = True) -> bool:
        t = self.lattice.to_lattice_coords(as_point(x, self.lattice.d)) - self.anchor_coords
        if closed:
            return bool(np.all(t >= -_FACE_TOL) and np.all(t <= 1.0 + _FACE_TOL))
        return bool(np.all(t > 0.0) and np.all(t < 1.0))


@dataclass(frozen=True)
class LatticePair:
    """Spatial/frequency lattice pair with its admissibility class.

    strong: <e_j, eps_j> = c for all j with 0 < c < 2*pi and zero cross terms;
    weak: the same with c = 2*pi exactly; anything else is inadmissible.
    """

    lambda1: Lattice
    lambda2: Lattice
    coupling: float | None
    kind: str  # "strong" | "weak" | "inadmissible"

    @property
    def is_strong(self) -> bool:
        return self.kind == "strong"


def classify_pair(lambda1: Lattice, lambda2: Lattice, tol: float = _PAIR_TOL) -> LatticePair:
    """Classify a lattice pair from the Gram matrix <e_j, eps_k>."""
    if lambda1.d != lambda2.d:
        raise ValueError("lattices must share a dimension")
    gram = lambda1.basis @ lambda2.basis.T
    diag = np.diagonal(gram)
    off = gram - np.diag(diag)
    c = float(np.mean(diag))
    biorthogonal = (
        float(np.max(np.abs(off), initial=0.0)) <= tol
        and float(np.max(np.abs(diag - c))) <= tol
    )
    if not biorthogonal or c <= tol:
        return LatticePair(lambda1, lambda2, None, "inadmissible")
    if abs(c - 2.0 * math.pi) <= tol:
        return LatticePair(lambda1, lambda2, c, "weak")
    if c < 2.0 * math.pi:
        return LatticePair(lambda1, lambda2, c, "strong")
    return LatticePair(lambda1, lambda2, None, "inadmissible")


def _integer_box_for_ball(lat: Lattice, r_max: float) -> tuple[np.ndarray, np.ndarray]:
    """Integer coordinate ranges bracketing the ball |x| <= r_max."""
    center = lat.to_lattice_coords(np.zeros(lat.d))
    semi = r_max * np.linalg.norm(lat._inv_basis, axis=0)
    lo = np.ceil(center - semi - 1e-9).astype(int)
    hi = np.floor(center + semi + 1e-9).astype(int)
    return lo, hi


def _enumerate_box(lo: np.ndarray, hi: np.ndarray, budget: int) -> np.ndarray:
    counts = hi - lo + 1
    total = int(np.prod(counts.astype(object)))
    if total > budget:
        raise BudgetExceeded(
            f"cone-shell bounding box holds {total} candidate cells, budget is {budget}"
        )
    axes = [np.arange(l, h + 1) for l, h in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _points_in_region(
    lat: Lattice,
    r_min: float,
    r_max: float,
    cone: Cone | None,
    budget: int,
) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = _integer_box_for_ball(lat, r_max)
    ts = _enumerate_box(lo, hi, budget)
    pts = lat.points(ts)
    r = np.linalg.norm(pts, axis=1)
    mask = (r > r_min) & (r <= r_max)
    if cone is not None:
        mask &= cone.contains(pts)
    ts, pts = ts[mask], pts[mask]
    order = np.lexsort(ts.T[::-1])  # lexicographic on integer coordinates
    return pts[order], ts[order]


def points_in_cone_shell(
    lat: Lattice,
    cone: Cone,
    r_min: float,
    r_max: float,
    budget: int = DEFAULT_CELL_BUDGET,
) -> np.ndarray:
    """Lattice points xi with xi in the cone and r_min < |xi| <= r_max.

    Deterministic lexicographic order on the integer coordinates.  Raises
    BudgetExceeded when the bounding box exceeds `budget` candidate cells.
    """
    if not r_min < r_max:
        raise ValueError(f"need r_min < r_max, got {r_min} >= {r_max}")
    pts, _ = _points_in_region(lat, r_min, r_max, cone, budget)
    return pts


def points_in_ball(
    lat: Lattice,
    r_max: float,
    r_min: float = -1.0,
    budget: int = DEFAULT_CELL_BUDGET,
) -> tuple[np.ndarray, np.ndarray]:
    """All lattice points with r_min < |xi| <= r_max plus integer coordinates.

    The default r_min = -1 includes the origin when the lattice contains it.
    """
    return _points_in_region(lat, r_min, r_max, None, budget)


def parallelepiped_containing(lat: Lattice, x0) -> Parallelepiped:
    """The cell D whose closure contains x0.

    When x0 sits on a cell face the tie breaks toward the cell with the
    smaller anchor coordinate, so x0 lands on that cell's upper face; the
    rule is deterministic and documented rather than meaningful.
    """
    t = lat.to_lattice_coords(as_point(x0, lat.d))
    nearest = np.round(t)
    on_face = np.abs(t - nearest) <= _FACE_TOL * np.maximum(1.0, np.abs(nearest))
    anchor = np.where(on_face, nearest - 1, np.floor(t)).astype(int)
    return Parallelepiped(lat, anchor)
