"""Cone-restricted seminorms as shell series, and their classification.

A cone seminorm is evaluated shell by shell over geometric radii
R_0 < 2 R_0 < ... <= R_max, with R_0 = 4 x (minimal lattice spacing) by
default so the non-asymptotic core is skipped.  For q < inf the per-shell
aggregate a_m is the q-th-power mass; for q = inf it is the shell maximum.

Classification fits log(a_m / shell width) against log R_m over the last K
usable shells.  Since a cone lattice holds ~ R^(d-1) points per unit radius,
a per-point decay |F f(xi) w(xi)| ~ |xi|^tau makes that density scale like
R^(q tau + d - 1), so the fitted slope sigma gives tau = (sigma - (d-1)) / q
and the series converges exactly when tau < -d/q.  Verdicts carry an
explicit inconclusive band of width `margin` around the threshold because
finitely many shells cannot decide the boundary case.  Shells whose raw
spectrum values sit below the quadrature noise floor are evidence of decay,
not data, and are excluded from the fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import MissingCoefficients, TooFewShells
from .gabor import CoefficientTable
from .geometry import Cone, Weight
from .lattice import DEFAULT_CELL_BUDGET, Lattice, points_in_ball
from .signal import DEFAULT_NYQUIST_SAFETY, GridSignal, fourier_batch
from .validation import check_exponent, check_positive

SHELL_RATIO = 2.0
DEFAULT_MARGIN = 0.15
DEFAULT_K_LAST = 6
DEFAULT_CAUCHY_TOL = 1e-3
_TRIM_TOL = 0.06


def shell_boundaries(r0: float, r_max: float) -> np.ndarray:
    """Geometric shell edges r0 * 2^m not exceeding r_max (full octaves only)."""
    r0 = check_positive(r0, "r0")
    if r_max <= r0 * SHELL_RATIO:
        raise ValueError(
            f"r_max = {r_max:g} leaves no full shell above r0 = {r0:g}"
        )
    m_top = int(math.floor(math.log(r_max / r0, SHELL_RATIO) + 1e-9))
    return r0 * SHELL_RATIO ** np.arange(m_top + 1)


@dataclass(frozen=True)
class SpectralSamples:
    """Spectrum magnitudes sampled on frequency points, ready for binning."""

    points: np.ndarray  # (n, d)
    radii: np.ndarray  # (n,)
    magnitudes: np.ndarray  # (n,) nonnegative
    cell_weight: float  # 1 for lattice sums, delta^d for quadrature
    noise_floor: float
    kind: str  # "lattice" | "quadrature" | "gabor"
    meta: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.points.shape[1]


def lattice_spectrum(
    f: GridSignal,
    lambda2: Lattice,
    r_max: float,
    safety: float = DEFAULT_NYQUIST_SAFETY,
    budget: int = DEFAULT_CELL_BUDGET,
) -> SpectralSamples:
    """|F f| on every lattice point with 0 < |xi| <= r_max."""
    pts, _ = points_in_ball(lambda2, r_max, r_min=0.0, budget=budget)
    vals = np.abs(fourier_batch(f, pts, safety)) if pts.size else np.zeros(0)
    return SpectralSamples(
        pts,
        np.linalg.norm(pts, axis=1) if pts.size else np.zeros(0),
        vals,
        1.0,
        f.noise_floor(),
        "lattice",
        {"lattice": lambda2.to_json()},
    )


def quadrature_spectrum(
    f: GridSignal,
    density: float,
    r_max: float,
    safety: float = DEFAULT_NYQUIST_SAFETY,
) -> SpectralSamples:
    """|F f| on midpoint quadrature nodes covering the ball |xi| <= r_max.

    `density` is nodes per unit length per axis, so each node carries the
    cell weight (1/density)^d; the nodes are independent of any lattice.
    """
    density = check_positive(density, "density")
    delta = 1.0 / density
    half = int(math.ceil(r_max / delta)) + 1
    axis = delta * (np.arange(-half, half) + 0.5)
    mesh = np.meshgrid(*([axis] * f.d), indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    radii = np.linalg.norm(pts, axis=1)
    keep = (radii > 0) & (radii <= r_max)
    pts, radii = pts[keep], radii[keep]
    vals = np.abs(fourier_batch(f, pts, safety)) if pts.size else np.zeros(0)
    return SpectralSamples(
        pts, radii, vals, delta**f.d, f.noise_floor(), "quadrature",
        {"density": density},
    )


@dataclass(frozen=True)
class ConeSumSeries:
    """Shell-wise aggregates of a cone seminorm.

    boundaries has M+1 entries R_0..R_M; shell m covers (R_{m-1}, R_m].
    For q < inf, a holds q-th-power masses and S their running total plus
    the in-cone mass below R_0 (the "core"); for q = inf both hold maxima.
    """

    boundaries: np.ndarray  # (M+1,)
    a: np.ndarray  # (M,)
    S: np.ndarray  # (M,)
    counts: np.ndarray  # (M,) frequency points/nodes per shell
    shell_absmax: np.ndarray  # (M,) unweighted spectrum max per shell
    q: float
    d: int
    core: float
    meta: dict = field(default_factory=dict)

    @property
    def n_shells(self) -> int:
        return self.a.size

    def to_csv(self, path) -> Path:
        p = Path(path)
        lines = ["R_m,a_m,S_m"]
        for r, a, s in zip(self.boundaries[1:], self.a, self.S):
            lines.append(f"{r!r},{a!r},{s!r}")
        p.write_text("\n".join(lines) + "\n")
        return p


def series_from_spectrum(
    spec: SpectralSamples,
    omega: Weight,
    q,
    cone: Cone | None,
    r0: float,
    r_max: float | None = None,
) -> ConeSumSeries:
    """Bin weighted spectrum samples into geometric cone shells."""
    q = check_exponent(q, "q")
    if r_max is None:
        r_max = float(np.max(spec.radii)) if spec.radii.size else r0 * 4
    bounds = shell_boundaries(r0, r_max)
    n_shell = bounds.size - 1
    if cone is None:
        mask = np.ones(spec.radii.size, dtype=bool)
    else:
        mask = cone.contains(spec.points) if spec.points.size else np.zeros(0, dtype=bool)
    r = spec.radii[mask]
    mags = spec.magnitudes[mask]
    w = omega(spec.points[mask]) if r.size else np.zeros(0)
    weighted = mags * w

    idx = np.searchsorted(bounds, r, side="left")  # 0 = core, 1..M = shells
    in_range = idx <= n_shell
    idx, r, mags, weighted = idx[in_range], r[in_range], mags[in_range], weighted[in_range]

    counts = np.bincount(idx, minlength=n_shell + 1)[1:]
    absmax = np.zeros(n_shell + 1)
    np.maximum.at(absmax, idx, mags)
    absmax = absmax[1:]

    if math.isinf(q):
        shell_max = np.zeros(n_shell + 1)
        np.maximum.at(shell_max, idx, weighted)
        core = float(shell_max[0])
        a = shell_max[1:]
        s = np.maximum.accumulate(np.concatenate(([core], a)))[1:]
    else:
        contrib = weighted**q * spec.cell_weight
        sums = np.bincount(idx, weights=contrib, minlength=n_shell + 1)
        core = float(sums[0])
        a = sums[1:]
        s = core + np.cumsum(a)

    meta = dict(spec.meta)
    meta.update(
        {
            "kind": spec.kind,
            "noise_floor": spec.noise_floor,
            "cone": cone.to_json() if cone is not None else None,
        }
    )
    return ConeSumSeries(bounds, a, s, counts, absmax, q, spec.d, core, meta)


def discrete_fl_series(
    f: GridSignal,
    omega: Weight,
    q,
    cone: Cone,
    lambda2: Lattice,
    r_max: float,
    r0: float | None = None,
    safety: float = DEFAULT_NYQUIST_SAFETY,
    budget: int = DEFAULT_CELL_BUDGET,
) -> ConeSumSeries:
    """Shell series of the discrete cone seminorm sum |F f(xi_k) w(xi_k)|^q
    over xi_k in cone intersect Lambda2 (shell maxima for q = inf)."""
    if r0 is None:
        r0 = 4.0 * lambda2.min_spacing
    spec = lattice_spectrum(f, lambda2, r_max, safety, budget)
    return series_from_spectrum(spec, omega, q, cone, r0, r_max)


def continuous_fl_series(
    f: GridSignal,
    omega: Weight,
    q,
    cone: Cone,
    density: float,
    r_max: float,
    r0: float | None = None,
    safety: float = DEFAULT_NYQUIST_SAFETY,
) -> ConeSumSeries:
    """Shell series of the continuous seminorm integral over the cone.

    Midpoint quadrature on a grid of the stated density; serves as the
    continuous oracle against which the lattice series is cross-checked.
    """
    if r0 is None:
        r0 = 4.0 / density
    spec = quadrature_spectrum(f, density, r_max, safety)
    return series_from_spectrum(spec, omega, q, cone, r0, r_max)


def discrete_mod_series(
    table: CoefficientTable,
    omega: Weight,
    p,
    q,
    cone: Cone,
    lambda2: Lattice,
    jset: np.ndarray,
    r0: float | None = None,
) -> ConeSumSeries:
    """Shell series of ( sum_j |c_{j,k} w(xi_k)|^p )^{q/p} over the cone.

    jset must be contained in the table's spatial indices and the table must
    cover the requested shells (MissingCoefficients otherwise).
    """
    p = check_exponent(p, "p")
    if not np.allclose(lambda2.basis, table.lambda2.basis):
        raise MissingCoefficients("table was computed on a different frequency lattice")
    jset = np.atleast_2d(np.asarray(jset, dtype=int))
    if jset.size == 0:
        mags = np.zeros(table.xi.shape[0])
        floor = 0.0
    else:
        rows = table.rows_for(jset)
        block = np.abs(table.values[rows])
        if math.isinf(p):
            mags = np.max(block, axis=0)
            floor = table.noise_floor
        else:
            mags = np.sum(block**p, axis=0) ** (1.0 / p)
            floor = table.noise_floor * rows.size ** (1.0 / p)
    if r0 is None:
        r0 = 4.0 * lambda2.min_spacing
    spec = SpectralSamples(
        table.xi,
        table.k_radii,
        mags,
        1.0,
        floor,
        "gabor",
        {"epsilon": table.epsilon, "n_j": int(jset.shape[0])},
    )
    return series_from_spectrum(spec, omega, q, cone, r0, table.freq_radius)


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

_CODES = {"divergent": 1, "finite": 0, "inconclusive": -1}


@dataclass(frozen=True)
class Verdict:
    """Finite / divergent / inconclusive decision for one cone series."""

    kind: str
    value: float | None  # seminorm estimate when finite
    tau: float | None  # fitted per-point decay exponent
    threshold: float
    margin: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def is_divergent(self) -> bool:
        return self.kind == "divergent"

    @property
    def is_conclusive(self) -> bool:
        return self.kind != "inconclusive"

    @property
    def code(self) -> int:
        return _CODES[self.kind]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "code": self.code,
            "value": self.value,
            "tau": self.tau,
            "threshold": self.threshold,
            "margin": self.margin,
            "diagnostics": self.diagnostics,
        }


def _weighted_fit(x: np.ndarray, y: np.ndarray, w: np.ndarray) -> tuple[float, float]:
    coef = np.polyfit(x, y, 1, w=w)
    resid = y - np.polyval(coef, x)
    rms = float(np.sqrt(np.sum((w * resid) ** 2) / np.sum(w**2)))
    return float(coef[0]), rms


def classify(
    series: ConeSumSeries,
    k_last: int = DEFAULT_K_LAST,
    margin: float = DEFAULT_MARGIN,
    cauchy_tol: float = DEFAULT_CAUCHY_TOL,
) -> Verdict:
    """Decide whether the cone series is finite, divergent, or unclear.

    See the module docstring for the decision rule.  A Cauchy cross-check
    (a stabilized partial sum cannot belong to a divergent series) may
    downgrade a divergent fit to inconclusive; it never upgrades.
    """
    if k_last < 4:
        raise ValueError("k_last must be at least 4")
    q, d = series.q, series.d
    threshold = 0.0 if math.isinf(q) else -d / q

    structural = np.nonzero(series.counts > 0)[0]
    if structural.size < 4:
        raise TooFewShells(
            f"only {structural.size} shells hold frequency points; need >= 4"
        )

    total = float(series.S[structural[-1]])
    if math.isinf(q):
        norm_estimate = total
    else:
        norm_estimate = total ** (1.0 / q) if total > 0 else 0.0
    if total == 0.0:
        return Verdict(
            "finite", 0.0, None, threshold, margin, {"reason": "empty series"}
        )

    floor = float(series.meta.get("noise_floor", 0.0))
    window = structural[-k_last:]
    floored = window[series.shell_absmax[window] <= floor]
    fit_idx = window[(series.shell_absmax[window] > floor) & (series.a[window] > 0)]

    diagnostics: dict = {
        "n_fit": int(fit_idx.size),
        "n_floored": int(floored.size),
        "shells_used": series.boundaries[1:][fit_idx].tolist(),
    }

    if fit_idx.size < 4:
        # The spectrum tail decayed into quadrature round-off: that is decay
        # evidence, so the series is finite at working precision.
        diagnostics["reason"] = "tail below quadrature noise floor"
        return Verdict("finite", norm_estimate, None, threshold, margin, diagnostics)

    x = np.log(series.boundaries[1:][fit_idx])
    if math.isinf(q):
        y = np.log(series.a[fit_idx])
        w = np.ones(fit_idx.size)
    else:
        widths = (series.boundaries[1:] - series.boundaries[:-1])[fit_idx]
        y = np.log(series.a[fit_idx] / widths)
        w = np.sqrt(series.counts[fit_idx])
    # Inner shells can carry a transient (cutoff transition spectrum, window
    # spread) that has not reached the power-law regime.  Drop leading
    # shells while doing so still moves the slope, keeping at least 4.
    sigma, resid = _weighted_fit(x, y, w)
    trimmed = 0
    while x.size > 4:
        sigma_drop, resid_drop = _weighted_fit(x[1:], y[1:], w[1:])
        if abs(sigma_drop - sigma) <= _TRIM_TOL:
            break
        x, y, w = x[1:], y[1:], w[1:]
        sigma, resid = sigma_drop, resid_drop
        trimmed += 1
    tau = sigma if math.isinf(q) else (sigma - (d - 1)) / q
    diagnostics.update(
        {"sigma": sigma, "residual": resid, "n_trimmed": trimmed}
    )

    rel_tail = None
    if not math.isinf(q) and total > 0:
        half = structural[structural.size // 2]
        rel_tail = float((series.S[structural[-1]] - series.S[half]) / total)
        diagnostics["rel_tail"] = rel_tail

    dist = tau - threshold
    if dist < -margin:
        return Verdict("finite", norm_estimate, tau, threshold, margin, diagnostics)
    if dist > margin:
        if rel_tail is not None and rel_tail < cauchy_tol:
            diagnostics["reason"] = "divergent slope but partial sums stabilized"
            return Verdict("inconclusive", None, tau, threshold, margin, diagnostics)
        return Verdict("divergent", None, tau, threshold, margin, diagnostics)
    return Verdict("inconclusive", None, tau, threshold, margin, diagnostics)
