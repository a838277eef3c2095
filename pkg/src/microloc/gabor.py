"""Admissible Gabor pairs: construction, analysis, synthesis, mixed norms.

The construction follows the cubic-lattice recipe: for alpha * beta < 2*pi
take Lambda1 = alpha Z^d, Lambda2 = beta Z^d, a nonnegative bump g supported
in a cube of side alpha1 in (alpha, 2*pi/beta), and set

    psi = (beta / 2*pi)^d * g / sum_j g(. - alpha j),

which makes sum_j psi(. - alpha j) = (beta / 2*pi)^d exactly by construction.
With phi a smooth cutoff equal to 1 on supp(psi) and supported in the cube of
side alpha2 = 2*pi/beta, the pair satisfies the partition condition

    sum_j (phi * psi)(. - x_j) = (2*pi)^(-d) * ||Lambda2||,

so the epsilon-dilated families stay dual frames for every epsilon in (0, 1]
and synthesis reproduces f with constant exactly 1.  All normalization is
carried by the dual window; coefficients are plain L^2 inner products

    c_{j,k}(eps) = (f, psi^eps_{j,k}) = (2*pi)^(d/2) F(f psi^eps(. - eps x_j))(xi_k).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import FrequencyOutOfRange, InadmissibleParameters, MissingCoefficients
from .lattice import Lattice, LatticePair, classify_pair, points_in_ball, scaled_integer_lattice
from .signal import (
    DEFAULT_NYQUIST_SAFETY,
    BumpWindow,
    GridSignal,
    fourier_batch,
    make_cutoff,
    multiply,
)
from .validation import as_point, check_exponent, check_in_open, check_positive

_TWO_PI = 2.0 * math.pi


def _axis_bump(half_width: float):
    """Peak-1 C-infinity bump on (-half_width, half_width), one axis."""

    def g(t: np.ndarray) -> np.ndarray:
        u = np.asarray(t, dtype=float) / half_width
        out = np.zeros_like(u)
        inside = np.abs(u) < 1.0
        ui = u[inside]
        with np.errstate(over="ignore", under="ignore"):
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - ui * ui))
        return out

    return g


def _dual_axis_profile(alpha: float, alpha1: float, theta_axis: float):
    """One axis of psi: theta_axis * g / (alpha-periodization of g)."""
    g = _axis_bump(alpha1 / 2.0)
    j_reach = int(math.ceil(alpha1 / (2.0 * alpha))) + 1

    def profile(t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        t0 = np.mod(t, alpha)
        per = np.zeros_like(t0)
        for j in range(-j_reach, j_reach + 1):
            per += g(t0 - alpha * j)
        vals = np.zeros_like(t)
        inside = np.abs(t) < alpha1 / 2.0
        gi = g(t[inside])
        # per >= gi wherever gi > 0 (the periodization contains the own term),
        # so the ratio is safe; underflowed edge values stay exactly zero
        pos = gi > 0.0
        ratio = np.zeros_like(gi)
        ratio[pos] = theta_axis * gi[pos] / per[inside][pos]
        vals[inside] = ratio
        return vals

    return profile


@dataclass(frozen=True)
class GaborSystem:
    """Window pair plus cubic lattice data for one dilation parameter."""

    phi: BumpWindow
    psi: BumpWindow
    pair: LatticePair
    alpha: float
    beta: float
    alpha1: float
    alpha2: float
    epsilon: float = 1.0
    index_budget: int = 4096

    def __post_init__(self):
        check_in_open(self.epsilon, 0.0, 1.0 + 1e-12, "epsilon")

    @property
    def d(self) -> int:
        return self.phi.d

    @property
    def partition_constant(self) -> float:
        """(2*pi)^-d * ||Lambda2|| = (beta / 2*pi)^d."""
        return (self.beta / _TWO_PI) ** self.d

    @property
    def lambda2(self) -> Lattice:
        return self.pair.lambda2

    def x_point(self, j) -> np.ndarray:
        return self.alpha * np.asarray(j, dtype=float)

    def psi_window(self, j) -> BumpWindow:
        return self.psi.scaled(self.epsilon).translated(self.epsilon * self.x_point(j))

    def phi_window(self, j) -> BumpWindow:
        return self.phi.scaled(self.epsilon).translated(self.epsilon * self.x_point(j))

    def with_epsilon(self, epsilon: float) -> "GaborSystem":
        return dataclasses.replace(self, epsilon=float(epsilon))


def build_agp(
    alpha: float,
    beta: float,
    d: int = 1,
    smoothness: float = math.inf,
    alpha1: float | None = None,
    epsilon: float = 1.0,
    index_budget: int = 4096,
) -> GaborSystem:
    """Construct an admissible Gabor pair on alpha Z^d / beta Z^d.

    Requires alpha * beta < 2*pi (InadmissibleParameters otherwise).  The
    dual window psi is a normalized positive bump, so the partition value
    (beta/2*pi)^d holds analytically; phi is a smooth cutoff equal to 1 on
    supp(psi).
    """
    alpha = check_positive(alpha, "alpha")
    beta = check_positive(beta, "beta")
    if alpha * beta >= _TWO_PI:
        raise InadmissibleParameters(
            f"alpha*beta = {alpha * beta:.6g} must be < 2*pi = {_TWO_PI:.6g}"
        )
    alpha2 = _TWO_PI / beta
    if alpha1 is None:
        alpha1 = 0.5 * (alpha + alpha2)
    if not (alpha < alpha1 < alpha2):
        raise InadmissibleParameters(
            f"window side alpha1 = {alpha1:.6g} must lie in (alpha, 2*pi/beta) "
            f"= ({alpha:.6g}, {alpha2:.6g})"
        )

    theta_axis = beta / _TWO_PI
    profiles = [_dual_axis_profile(alpha, alpha1, theta_axis) for _ in range(d)]

    def psi_fn(p: np.ndarray) -> np.ndarray:
        vals = np.ones(p.shape[0])
        for i in range(d):
            vals = vals * profiles[i](p[:, i])
        return vals

    half1 = alpha1 / 2.0 * np.ones(d)
    psi = BumpWindow(-half1, half1, psi_fn, smoothness, nonneg=True)

    half2 = alpha2 / 2.0 * np.ones(d)
    phi = make_cutoff((-half1, half1), (-half2, half2), smoothness)

    pair = classify_pair(
        scaled_integer_lattice(alpha, d), scaled_integer_lattice(beta, d)
    )
    if not pair.is_strong:
        raise InadmissibleParameters(
            f"lattice pair classified as {pair.kind}; a strong pair is required"
        )
    return GaborSystem(
        phi, psi, pair, alpha, beta, float(alpha1), alpha2, epsilon, index_budget
    )


def check_partition(sys: GaborSystem, n: int = 256) -> float:
    """Max deviation of sum_j (phi psi)(. - eps x_j) from the partition value.

    The sum is eps*alpha periodic, so one fundamental cell sampled at n
    points per axis is checked.
    """
    eps, alpha = sys.epsilon, sys.alpha
    step = eps * alpha
    axes = [np.linspace(0.0, step, n, endpoint=False) for _ in range(sys.d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    reach = int(math.ceil(sys.alpha2 / (2.0 * alpha))) + 1
    total = np.zeros(pts.shape[0])
    ranges = [range(-reach, reach + 2)] * sys.d
    grids = np.meshgrid(*[np.array(list(r)) for r in ranges], indexing="ij")
    js = np.stack([g.ravel() for g in grids], axis=1)
    for j in js:
        shifted = (pts - step * j) / eps  # phi^eps(x) = phi(x / eps)
        total += sys.phi(shifted) * sys.psi(shifted)
    return float(np.max(np.abs(total - sys.partition_constant)))


@dataclass(frozen=True)
class CoefficientTable:
    """Analysis coefficients c_{j,k}(eps) on a ball of frequency indices."""

    js: np.ndarray  # (nj, d) integers
    ks: np.ndarray  # (nk, d) integers
    xi: np.ndarray  # (nk, d) frequency points
    values: np.ndarray  # (nj, nk) complex
    epsilon: float
    freq_radius: float
    lambda2: Lattice
    noise_floor: float = 0.0

    @property
    def d(self) -> int:
        return self.js.shape[1] if self.js.size else self.xi.shape[1]

    @cached_property
    def k_radii(self) -> np.ndarray:
        return np.linalg.norm(self.xi, axis=1)

    @cached_property
    def _j_index(self) -> dict:
        return {tuple(int(v) for v in j): i for i, j in enumerate(self.js)}

    def rows_for(self, js: np.ndarray) -> np.ndarray:
        idx = []
        for j in np.atleast_2d(js):
            key = tuple(int(v) for v in j)
            if key not in self._j_index:
                raise MissingCoefficients(f"table lacks spatial index {key}")
            idx.append(self._j_index[key])
        return np.asarray(idx, dtype=int)

    def to_csv(self, path) -> Path:
        p = Path(path)
        d = self.d
        header = (
            [f"j{i}" for i in range(d)] + [f"k{i}" for i in range(d)] + ["re", "im"]
        )
        lines = [",".join(header)]
        for a, j in enumerate(self.js):
            for b, k in enumerate(self.ks):
                v = self.values[a, b]
                cells = [str(int(x)) for x in j] + [str(int(x)) for x in k]
                lines.append(",".join(cells + [repr(v.real), repr(v.imag)]))
        p.write_text("\n".join(lines) + "\n")
        return p


def _overlapping_js(f: GridSignal, sys: GaborSystem) -> np.ndarray:
    """All j whose scaled dual-window support meets the signal support."""
    if f.is_empty():
        return np.zeros((0, sys.d), dtype=int)
    lo, hi = f.support_box
    eps, alpha = sys.epsilon, sys.alpha
    reach = eps * sys.alpha1 / 2.0
    b = sys.index_budget
    axes = []
    for i in range(sys.d):
        jlo = max(int(math.ceil((lo[i] - reach) / (eps * alpha) - 1e-9)), -b)
        jhi = min(int(math.floor((hi[i] + reach) / (eps * alpha) + 1e-9)), b)
        if jhi < jlo:
            return np.zeros((0, sys.d), dtype=int)
        axes.append(np.arange(jlo, jhi + 1))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _coeff_rows_1d(
    f: GridSignal, sys: GaborSystem, xi: np.ndarray, js: np.ndarray, scale: float
) -> tuple[np.ndarray, float]:
    """Per-j coefficient rows sharing one exp kernel.

    Every windowed patch lives on a contiguous index range of the same grid,
    so exp(-i x_n xi) factors into a per-j phase times a shared (sample
    offset, frequency) kernel; this removes the dominant per-j exp cost.
    """
    h = float(f.spacing[0])
    u = xi[:, 0]
    x = f.axes()[0]
    n = x.size
    length = int(math.ceil(sys.epsilon * sys.alpha1 / h)) + 2
    kernel = np.exp(-1j * h * np.outer(np.arange(length), u))
    norm = _TWO_PI ** (-0.5) * h * scale
    values = np.zeros((js.shape[0], u.size), dtype=np.complex128)
    floor = 0.0
    abs_samples = np.abs(f.samples)
    for row, j in enumerate(js):
        w = sys.psi_window(j)
        i0 = max(int(math.ceil((w.lo[0] - x[0]) / h - 1e-12)), 0)
        i1 = min(int(math.floor((w.hi[0] - x[0]) / h + 1e-12)) + 1, n)
        if i1 <= i0:
            continue
        g = f.samples[i0:i1] * w(x[i0:i1, None])
        values[row] = (
            norm * np.exp(-1j * x[i0] * u) * (g @ kernel[: i1 - i0])
        )
        mass = float(np.sum(np.abs(g)))
        floor = max(
            floor,
            np.finfo(float).eps * 64.0 * math.sqrt(max(i1 - i0, 1)) * norm * mass,
        )
    return values, floor


def coefficients(
    f: GridSignal,
    sys: GaborSystem,
    freq_radius: float,
    js: np.ndarray | None = None,
    safety: float = DEFAULT_NYQUIST_SAFETY,
) -> CoefficientTable:
    """Analysis coefficients c_{j,k}(eps) = (f, psi^eps_{j,k})_{L^2}.

    Computed as (2*pi)^(d/2) * F(f * psi^eps(. - eps x_j))(xi_k) for every
    frequency lattice point with |xi_k| <= freq_radius.  By default j runs
    over every translate overlapping the signal support; pass `js` to
    restrict (e.g. to a support index set around one point).
    """
    check_positive(freq_radius, "freq_radius")
    if js is None:
        js = _overlapping_js(f, sys)
    js = np.atleast_2d(np.asarray(js, dtype=int))
    if js.size == 0:
        js = js.reshape(0, sys.d)
    xi, kints = points_in_ball(sys.lambda2, freq_radius)
    scale = _TWO_PI ** (sys.d / 2)
    limit = f.nyquist_limit(safety)
    if xi.size and np.any(np.max(np.abs(xi), axis=0) > limit):
        raise FrequencyOutOfRange(
            f"freq_radius {freq_radius:g} exceeds the guarded band {limit} "
            f"(safety {safety} x pi/h)"
        )
    if sys.d == 1 and js.size:
        values, floor = _coeff_rows_1d(f, sys, xi, js, scale)
        return CoefficientTable(
            js, kints, xi, values, sys.epsilon, float(freq_radius), sys.lambda2, floor
        )
    values = np.zeros((js.shape[0], xi.shape[0]), dtype=np.complex128)
    floor = 0.0
    for row, j in enumerate(js):
        g = multiply(f, sys.psi_window(j))
        if g.is_empty():
            continue
        values[row] = scale * fourier_batch(g, xi, safety)
        floor = max(floor, scale * g.noise_floor())
    return CoefficientTable(
        js, kints, xi, values, sys.epsilon, float(freq_radius), sys.lambda2, floor
    )


def _synthesize_patch(axes: list[np.ndarray], xi: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """sum_k c_k exp(i<x, xi_k>) on a tensor grid, via per-axis factoring."""
    d = len(axes)
    if d == 1:
        u, inv = np.unique(xi[:, 0], return_inverse=True)
        cu = np.zeros(u.size, dtype=np.complex128)
        np.add.at(cu, inv, coeffs)
        return np.exp(1j * np.outer(axes[0], u)) @ cu
    if d == 2:
        u1, i1 = np.unique(xi[:, 0], return_inverse=True)
        u2, i2 = np.unique(xi[:, 1], return_inverse=True)
        rect = np.zeros((u1.size, u2.size), dtype=np.complex128)
        np.add.at(rect, (i1, i2), coeffs)
        e1 = np.exp(1j * np.outer(axes[0], u1))
        e2 = np.exp(1j * np.outer(u2, axes[1]))
        return e1 @ rect @ e2
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    vals = np.exp(1j * (pts @ xi.T)) @ coeffs
    return vals.reshape(tuple(a.size for a in axes))


def reconstruct(table: CoefficientTable, sys: GaborSystem, grid) -> GridSignal:
    """Partial synthesis sum_{j,k} c_{j,k}(eps) phi^eps_{j,k} on a grid.

    `grid` is a GridSignal template or an (origin, spacing, shape) triple.
    The result converges to f as freq_radius grows; the residual is the
    coefficient tail plus quadrature error.
    """
    if isinstance(grid, GridSignal):
        origin, spacing, shape = grid.origin, grid.spacing, grid.shape
    else:
        origin, spacing, shape = grid
        origin = as_point(origin, name="origin")
        spacing = np.broadcast_to(as_point(spacing, name="spacing"), origin.shape).astype(float)
        shape = tuple(int(n) for n in shape)
    out = np.zeros(shape, dtype=np.complex128)
    if len(shape) == 1 and table.js.size:
        h = float(spacing[0])
        u = table.xi[:, 0]
        x = origin[0] + h * np.arange(shape[0])
        length = int(math.ceil(sys.epsilon * sys.alpha2 / h)) + 2
        kernel = np.exp(1j * h * np.outer(np.arange(length), u))
        for row, j in enumerate(table.js):
            w = sys.phi_window(j)
            i0 = max(int(math.ceil((w.lo[0] - origin[0]) / h - 1e-12)), 0)
            i1 = min(int(math.floor((w.hi[0] - origin[0]) / h + 1e-12)) + 1, shape[0])
            if i1 <= i0:
                continue
            inner = kernel[: i1 - i0] @ (table.values[row] * np.exp(1j * x[i0] * u))
            out[i0:i1] += w(x[i0:i1, None]) * inner
        return GridSignal.from_samples(out, origin, spacing)
    for row, j in enumerate(table.js):
        w = sys.phi_window(j)
        lo_idx = np.ceil((w.lo - origin) / spacing - 1e-12).astype(int)
        hi_idx = np.floor((w.hi - origin) / spacing + 1e-12).astype(int) + 1
        lo_idx = np.maximum(lo_idx, 0)
        hi_idx = np.minimum(hi_idx, np.asarray(shape))
        if np.any(hi_idx <= lo_idx):
            continue
        axes = [
            origin[i] + spacing[i] * np.arange(lo_idx[i], hi_idx[i])
            for i in range(len(shape))
        ]
        inner = _synthesize_patch(axes, table.xi, table.values[row])
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        wvals = w(pts).reshape(inner.shape)
        region = tuple(slice(a, b) for a, b in zip(lo_idx, hi_idx))
        out[region] += wvals * inner
    return GridSignal.from_samples(out, origin, spacing)


def support_index_set(sys: GaborSystem, x0) -> np.ndarray:
    """The finite set J_{x0}(eps): all j with x0 in supp phi^eps_{j,k}.

    phi's support contains psi's, so the phi condition covers both windows;
    supports do not depend on the frequency index.  Translates beyond the
    system's index budget are not considered.
    """
    x0 = as_point(x0, sys.d, "x0")
    eps, alpha = sys.epsilon, sys.alpha
    half = sys.alpha2 / 2.0
    b = sys.index_budget
    axes = []
    for i in range(sys.d):
        jlo = max(int(math.ceil((x0[i] / eps - half) / alpha - 1e-12)), -b)
        jhi = min(int(math.floor((x0[i] / eps + half) / alpha + 1e-12)), b)
        if jhi < jlo:
            return np.zeros((0, sys.d), dtype=int)
        axes.append(np.arange(jlo, jhi + 1))
    mesh = np.meshgrid(*axes, indexing="ij")
    js = np.stack([m.ravel() for m in mesh], axis=1)
    order = np.lexsort(js.T[::-1])
    return js[order]


def discrete_mod_norm(table: CoefficientTable, omega, p, q) -> float:
    """Mixed norm ( sum_k ( sum_j |c_{j,k} w(xi_k)|^p )^{q/p} )^{1/q}.

    p aggregates over the spatial index, q over frequency; inf means max.
    Weights are evaluated at xi_k only (x-independent weights).
    """
    p = check_exponent(p, "p")
    q = check_exponent(q, "q")
    if table.values.size == 0:
        return 0.0
    a = np.abs(table.values) * omega(table.xi)[None, :]
    if math.isinf(p):
        inner = np.max(a, axis=0)
    else:
        inner = np.sum(a**p, axis=0) ** (1.0 / p)
    if math.isinf(q):
        return float(np.max(inner))
    return float(np.sum(inner**q) ** (1.0 / q))
