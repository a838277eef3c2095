"""Input-validation helpers shared by the public API."""

from __future__ import annotations

import math

import numpy as np


def as_float_array(x, name: str = "value") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite, got {x!r}")
    return arr


def as_point(x, d: int | None = None, name: str = "point") -> np.ndarray:
    """Coerce to a 1-d float vector, optionally of fixed dimension."""
    arr = np.atleast_1d(as_float_array(x, name))
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a flat vector, got shape {arr.shape}")
    if d is not None and arr.size != d:
        raise ValueError(f"{name} must have dimension {d}, got {arr.size}")
    return arr


def as_points(x, d: int | None = None, name: str = "points") -> np.ndarray:
    """Coerce to an (n, d) array of points; accepts (n,) when d == 1."""
    arr = as_float_array(x, name)
    if arr.ndim == 1:
        arr = arr[:, None] if d in (None, 1) else arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be an (n, d) array, got shape {arr.shape}")
    if d is not None and arr.shape[1] != d:
        raise ValueError(f"{name} must have dimension {d}, got {arr.shape[1]}")
    return arr


def unit_direction(v, name: str = "direction") -> np.ndarray:
    arr = as_point(v, name=name)
    n = float(np.linalg.norm(arr))
    if n == 0.0:
        raise ValueError(f"{name} must be a nonzero vector")
    return arr / n


def check_exponent(p, name: str = "exponent") -> float:
    """Validate a Lebesgue exponent in [1, inf]; accepts the string 'inf'."""
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infty", "infinity"):
            return math.inf
        p = float(p)
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise ValueError(f"{name} must satisfy 1 <= {name} <= inf, got {p}")
    return p


def check_positive(x, name: str = "value") -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise ValueError(f"{name} must be a positive finite number, got {x}")
    return x


def check_in_open(x, lo: float, hi: float, name: str = "value") -> float:
    x = float(x)
    if not (lo < x < hi):
        raise ValueError(f"{name} must lie in the open interval ({lo}, {hi}), got {x}")
    return x


def as_box(box, d: int | None = None, name: str = "box") -> tuple[np.ndarray, np.ndarray]:
    """Coerce to a (lo, hi) pair of d-vectors with lo <= hi."""
    lo, hi = box
    lo = as_point(lo, d, f"{name} lower corner")
    hi = as_point(hi, lo.size, f"{name} upper corner")
    if np.any(hi < lo):
        raise ValueError(f"{name} has hi < lo: {lo} .. {hi}")
    return lo, hi
