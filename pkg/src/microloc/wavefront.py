"""Point verdicts and scans for the discrete wave-front sets.

A query fixes a base point x0, a direction, a cone aperture, exponents and a
weight.  The Fourier-Lebesgue verdict localizes with a smooth cutoff chi
supported inside the spatial-lattice cell containing x0 (chi(x0) = 1) and
classifies the lattice cone series of chi*f.  The modulation verdict
classifies the mixed (p over j, q over k) cone series of Gabor coefficients
restricted to the translates whose supports contain x0.  Divergent means
(x0, direction) belongs to the wave-front set at the queried aperture.

Membership is reported per aperture (default 20 degrees); `aperture_sweep`
refines toward the "every conical neighbourhood" quantifier.  Default radial
cutoff for series is 0.7 / h: beyond that the rectangle-rule spectrum of a
sampled discontinuity is visibly distorted by aliasing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import DomainClipped, EpsilonTooLarge, MicrolocError
from .gabor import CoefficientTable, GaborSystem, build_agp, coefficients, support_index_set
from .geometry import Cone, Weight
from .lattice import Lattice, LatticePair, classify_pair, parallelepiped_containing, points_in_ball, scaled_integer_lattice
from .seminorm import (
    DEFAULT_K_LAST,
    DEFAULT_MARGIN,
    SpectralSamples,
    Verdict,
    classify,
    discrete_mod_series,
    series_from_spectrum,
)
from .signal import DEFAULT_NYQUIST_SAFETY, BumpWindow, GridSignal, fourier_batch, make_cutoff, multiply
from .validation import as_point, check_exponent, check_in_open, unit_direction

ALIAS_SAFE_FACTOR = 0.7


def default_r_max(f: GridSignal) -> float:
    """Largest shell radius at which sampled discontinuities keep their
    asymptotic spectrum slope (alias distortion below a few percent)."""
    return ALIAS_SAFE_FACTOR / float(np.max(f.spacing))


@dataclass(frozen=True)
class WavefrontQuery:
    """One (point, direction) membership question with its parameters."""

    x0: np.ndarray
    direction: np.ndarray
    aperture_deg: float = 20.0
    q: float = 1.0
    p: float = 1.0
    weight: Weight | float = 0.0
    epsilon: float | None = None
    r_max: float | None = None
    r0: float | None = None
    inner_frac: float = 0.25
    outer_cap_frac: float = 0.45
    margin: float = DEFAULT_MARGIN
    k_last: int = DEFAULT_K_LAST
    safety: float = DEFAULT_NYQUIST_SAFETY
    smoothness: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "x0", as_point(self.x0, name="x0"))
        object.__setattr__(self, "direction", unit_direction(self.direction))
        check_in_open(self.aperture_deg, 0.0, 90.0, "aperture_deg")
        object.__setattr__(self, "q", check_exponent(self.q, "q"))
        object.__setattr__(self, "p", check_exponent(self.p, "p"))
        if not isinstance(self.weight, Weight):
            object.__setattr__(self, "weight", Weight.bracket_power(float(self.weight)))
        if self.epsilon is not None:
            check_in_open(self.epsilon, 0.0, 1.0 + 1e-12, "epsilon")
        check_in_open(self.inner_frac, 0.0, 1.0, "inner_frac")

    @property
    def cone(self) -> Cone:
        return Cone.from_degrees(self.direction, self.aperture_deg)

    @property
    def s(self) -> float | None:
        return self.weight.s if self.weight.kind == "bracket_power" else None


def _interior_distance(x0: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> float:
    return float(np.min(np.minimum(x0 - lo, hi - x0)))


def cutoff_for(
    f: GridSignal,
    lambda1: Lattice,
    x0: np.ndarray,
    inner_frac: float = 0.25,
    outer_cap_frac: float = 0.45,
    smoothness: float = math.inf,
) -> BumpWindow:
    """Smooth cutoff chi with chi(x0) = 1 supported inside (cell of x0) cap X.

    The outer radius is min(0.9 x distance to the boundary of the cell/domain
    intersection, outer_cap_frac x shortest cell edge); the cap keeps the
    cutoff local so membership reflects the geometry near x0 rather than
    whatever else the cell contains.  Raises DomainClipped when no cutoff
    with a grid-resolvable transition fits.
    """
    if not lambda1.is_diagonal:
        raise ValueError("cutoff construction requires an axis-aligned spatial lattice")
    cell = parallelepiped_containing(lambda1, x0)
    d_lo, d_hi = cell.bounding_box()
    x_lo, x_hi = f.domain_box
    lo = np.maximum(d_lo, x_lo)
    hi = np.minimum(d_hi, x_hi)
    dist = _interior_distance(x0, lo, hi)
    if dist <= 0:
        raise DomainClipped(
            f"x0 = {x0.tolist()} sits on the boundary of its cell/domain intersection"
        )
    outer = min(0.9 * dist, outer_cap_frac * lambda1.min_spacing)
    h = float(np.max(f.spacing))
    if outer < 10.0 * h:
        raise DomainClipped(
            f"admissible cutoff radius {outer:.3g} is under 10 grid steps ({h:.3g}); "
            "the cell/domain intersection around x0 is too small"
        )
    inner = inner_frac * outer
    return make_cutoff((x0 - inner, x0 + inner), (x0 - outer, x0 + outer), smoothness)


def _require_interior(f: GridSignal, x0: np.ndarray) -> None:
    lo, hi = f.domain_box
    if not (np.all(x0 > lo) & np.all(x0 < hi)):
        raise DomainClipped(f"x0 = {x0.tolist()} is not interior to the signal domain")


def df_fl_point(f: GridSignal, query: WavefrontQuery, pair: LatticePair) -> Verdict:
    """Fourier-Lebesgue membership verdict at (x0, direction)."""
    if not pair.is_strong:
        raise ValueError(f"lattice pair must be strongly admissible, got {pair.kind}")
    x0 = as_point(query.x0, f.d, "x0")
    _require_interior(f, x0)
    chi = cutoff_for(
        f, pair.lambda1, x0, query.inner_frac, query.outer_cap_frac, query.smoothness
    )
    g = multiply(f, chi)
    r_max = query.r_max if query.r_max is not None else default_r_max(f)
    r0 = query.r0 if query.r0 is not None else 4.0 * pair.lambda2.min_spacing
    spec = _fl_spectrum(g, pair.lambda2, r_max, query.safety)
    series = series_from_spectrum(spec, query.weight, query.q, query.cone, r0, r_max)
    return classify(series, query.k_last, query.margin)


def _fl_spectrum(
    g: GridSignal, lambda2: Lattice, r_max: float, safety: float
) -> SpectralSamples:
    pts, _ = points_in_ball(lambda2, r_max, r_min=0.0)
    vals = np.abs(fourier_batch(g, pts, safety)) if pts.size else np.zeros(0)
    return SpectralSamples(
        pts,
        np.linalg.norm(pts, axis=1) if pts.size else np.zeros(0),
        vals,
        1.0,
        g.noise_floor(),
        "lattice",
        {"lattice": lambda2.to_json()},
    )


def choose_epsilon(
    f: GridSignal, sys: GaborSystem, x0: np.ndarray, cell_edge: float | None = None
) -> float:
    """Largest dyadic epsilon whose local window supports fit the constraints.

    Requires eps * (phi support side) <= cell edge, and every window support
    containing x0 (reach eps * alpha2 around x0) inside the signal domain.
    """
    cell = cell_edge if cell_edge is not None else sys.alpha
    lo, hi = f.domain_box
    eps = 1.0
    for _ in range(48):
        reach = eps * sys.alpha2
        if (
            reach <= cell + 1e-12
            and np.all(x0 - reach >= lo)
            and np.all(x0 + reach <= hi)
        ):
            return eps
        eps *= 0.5
    raise EpsilonTooLarge(
        f"no dyadic epsilon keeps window supports near x0 = {x0.tolist()} inside the domain"
    )


def _validate_epsilon(f: GridSignal, sys: GaborSystem, x0: np.ndarray, eps: float) -> None:
    lo, hi = f.domain_box
    reach = eps * sys.alpha2
    if np.any(x0 - reach < lo) or np.any(x0 + reach > hi):
        raise EpsilonTooLarge(
            f"epsilon = {eps:g} lets window supports around x0 = {x0.tolist()} "
            "stick out of the signal domain"
        )


def df_mod_point(f: GridSignal, query: WavefrontQuery, sys: GaborSystem) -> Verdict:
    """Modulation-space membership verdict at (x0, direction)."""
    x0 = as_point(query.x0, f.d, "x0")
    _require_interior(f, x0)
    if query.epsilon is not None:
        _validate_epsilon(f, sys, x0, query.epsilon)
        eps = query.epsilon
    else:
        eps = choose_epsilon(f, sys, x0)
    sys_eps = sys.with_epsilon(eps)
    jset = support_index_set(sys_eps, x0)
    r_max = query.r_max if query.r_max is not None else default_r_max(f)
    r0 = query.r0 if query.r0 is not None else 4.0 * sys.lambda2.min_spacing
    table = coefficients(f, sys_eps, r_max, js=jset, safety=query.safety)
    series = discrete_mod_series(
        table, query.weight, query.p, query.q, query.cone, sys.lambda2, jset, r0
    )
    return classify(series, query.k_last, query.margin)


# ---------------------------------------------------------------------------
# Scans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanConfig:
    """Shared parameters for a wave-front scan."""

    pqs: tuple = ((1.0, 1.0, 1.0),)  # (p, q, s) triples
    aperture_deg: float = 20.0
    alpha: float = 1.0
    beta: float = 1.0
    gabor_alpha: float | None = None  # spatial step of the Gabor system (defaults to alpha)
    gabor_alpha1: float | None = None  # dual-window support side (default midpoint rule)
    epsilon: float | None = None
    r_max: float | None = None
    r0: float | None = None
    margin: float = DEFAULT_MARGIN
    k_last: int = DEFAULT_K_LAST
    inner_frac: float = 0.25
    outer_cap_frac: float = 0.45
    safety: float = DEFAULT_NYQUIST_SAFETY
    smoothness: float = math.inf
    methods: tuple = ("fl", "mod")
    center_cells: bool = True  # offset Lambda1 by -alpha/2 so cells center on 0

    def to_json(self) -> dict:
        return {
            "pqs": [list(map(float, t)) for t in self.pqs],
            "aperture_deg": self.aperture_deg,
            "alpha": self.alpha,
            "beta": self.beta,
            "gabor_alpha": self.gabor_alpha,
            "gabor_alpha1": self.gabor_alpha1,
            "epsilon": self.epsilon,
            "r_max": self.r_max,
            "r0": self.r0,
            "margin": self.margin,
            "k_last": self.k_last,
            "inner_frac": self.inner_frac,
            "outer_cap_frac": self.outer_cap_frac,
            "safety": self.safety,
            "methods": list(self.methods),
            "center_cells": self.center_cells,
        }

    def lattice_pair(self, d: int) -> LatticePair:
        offset = -0.5 * self.alpha * np.ones(d) if self.center_cells else None
        pair = classify_pair(
            scaled_integer_lattice(self.alpha, d, offset),
            scaled_integer_lattice(self.beta, d),
        )
        if not pair.is_strong:
            raise ValueError(
                f"alpha = {self.alpha}, beta = {self.beta} give a {pair.kind} pair; "
                "a strongly admissible pair is required"
            )
        return pair


@dataclass
class WavefrontRecord:
    """One scanned (x0, direction, p, q, s) row with both verdicts."""

    x0: list
    theta: list
    p: float
    q: float
    s: float
    aperture_deg: float
    verdict_fl: Verdict | None = None
    verdict_mod: Verdict | None = None
    error_fl: str | None = None
    error_mod: str | None = None

    def to_json(self) -> dict:
        return {
            "x0": self.x0,
            "theta": self.theta,
            "p": self.p,
            "q": self.q,
            "s": self.s,
            "aperture_deg": self.aperture_deg,
            "fl": self.verdict_fl.to_json() if self.verdict_fl else None,
            "mod": self.verdict_mod.to_json() if self.verdict_mod else None,
            "error_fl": self.error_fl,
            "error_mod": self.error_mod,
        }


@dataclass
class WavefrontEstimate:
    """All records of a scan plus the configuration snapshot."""

    records: list
    config: dict

    def to_json(self) -> dict:
        return {"config": self.config, "records": [r.to_json() for r in self.records]}

    def heatmap_csv(self, path) -> Path:
        """CSV for external plotting: coordinates, direction angle (degrees),
        fitted exponents and verdict codes (1 divergent / 0 finite / -1
        inconclusive, blank on per-record errors)."""
        p = Path(path)
        if not self.records:
            p.write_text("x0_0,theta_deg,p,q,s,tau_fl,tau_mod,fl_code,mod_code\n")
            return p
        d = len(self.records[0].x0)
        cols = [f"x0_{i}" for i in range(d)] + ["theta_deg", "p", "q", "s"]
        cols += ["tau_fl", "tau_mod", "fl_code", "mod_code"]
        lines = [",".join(cols)]
        for r in self.records:
            theta_deg = math.degrees(math.atan2(r.theta[1], r.theta[0])) if d == 2 else (
                0.0 if r.theta[0] >= 0 else 180.0
            )
            def _tau(v):
                return "" if v is None or v.tau is None else repr(v.tau)
            def _code(v):
                return "" if v is None else str(v.code)
            cells = [repr(x) for x in r.x0] + [repr(theta_deg), repr(r.p), repr(r.q), repr(r.s)]
            cells += [_tau(r.verdict_fl), _tau(r.verdict_mod), _code(r.verdict_fl), _code(r.verdict_mod)]
            lines.append(",".join(cells))
        p.write_text("\n".join(lines) + "\n")
        return p


def scan(f: GridSignal, x_grid, directions, cfg: ScanConfig) -> WavefrontEstimate:
    """Run both point operations over x_grid x directions x cfg.pqs.

    Per-record failures are recorded in the row, never abort the scan.  The
    windowed spectrum per x0 and the coefficient rows per (epsilon, j) are
    cached, so extra directions and (p, q, s) triples are cheap.
    """
    x_grid = [as_point(x, f.d, "x0") for x in x_grid]
    directions = [unit_direction(v) for v in directions]
    records: list[WavefrontRecord] = []
    estimate = WavefrontEstimate(records, {"scan": cfg.to_json()})
    if not x_grid or not directions:
        return estimate

    pair = cfg.lattice_pair(f.d)
    want_fl = "fl" in cfg.methods
    want_mod = "mod" in cfg.methods
    g_alpha = cfg.gabor_alpha if cfg.gabor_alpha is not None else cfg.alpha
    sys = (
        build_agp(g_alpha, cfg.beta, f.d, cfg.smoothness, alpha1=cfg.gabor_alpha1)
        if want_mod
        else None
    )
    r_max = cfg.r_max if cfg.r_max is not None else default_r_max(f)
    r0 = cfg.r0 if cfg.r0 is not None else 4.0 * pair.lambda2.min_spacing

    cones = [Cone.from_degrees(th, cfg.aperture_deg) for th in directions]
    row_cache: dict = {}

    for x0 in x_grid:
        fl_spec: SpectralSamples | None = None
        fl_err: str | None = None
        if want_fl:
            try:
                chi = cutoff_for(
                    f, pair.lambda1, x0, cfg.inner_frac, cfg.outer_cap_frac, cfg.smoothness
                )
                _require_interior(f, x0)
                fl_spec = _fl_spectrum(multiply(f, chi), pair.lambda2, r_max, cfg.safety)
            except MicrolocError as exc:
                fl_err = f"{type(exc).__name__}: {exc}"

        table: CoefficientTable | None = None
        jset = None
        mod_err: str | None = None
        if want_mod:
            try:
                _require_interior(f, x0)
                if cfg.epsilon is not None:
                    _validate_epsilon(f, sys, x0, cfg.epsilon)
                    eps = cfg.epsilon
                else:
                    eps = choose_epsilon(f, sys, x0, cell_edge=cfg.alpha)
                sys_eps = sys.with_epsilon(eps)
                jset = support_index_set(sys_eps, x0)
                table = _cached_table(f, sys_eps, jset, r_max, cfg.safety, row_cache)
            except MicrolocError as exc:
                mod_err = f"{type(exc).__name__}: {exc}"

        for theta, cone in zip(directions, cones):
            for p, q, s in cfg.pqs:
                w = Weight.bracket_power(s)
                rec = WavefrontRecord(
                    [float(v) for v in x0],
                    [float(v) for v in theta],
                    float(p),
                    float(q),
                    float(s),
                    cfg.aperture_deg,
                    error_fl=fl_err,
                    error_mod=mod_err,
                )
                if want_fl and fl_spec is not None:
                    try:
                        series = series_from_spectrum(fl_spec, w, q, cone, r0, r_max)
                        rec.verdict_fl = classify(series, cfg.k_last, cfg.margin)
                    except MicrolocError as exc:
                        rec.error_fl = f"{type(exc).__name__}: {exc}"
                if want_mod and table is not None:
                    try:
                        series = discrete_mod_series(
                            table, w, p, q, cone, pair.lambda2, jset, r0
                        )
                        rec.verdict_mod = classify(series, cfg.k_last, cfg.margin)
                    except MicrolocError as exc:
                        rec.error_mod = f"{type(exc).__name__}: {exc}"
                records.append(rec)
    return estimate


def _cached_table(
    f: GridSignal,
    sys_eps: GaborSystem,
    jset: np.ndarray,
    r_max: float,
    safety: float,
    row_cache: dict,
) -> CoefficientTable:
    """Assemble a coefficient table reusing per-(epsilon, j) rows."""
    rows = []
    floor = 0.0
    template = None
    for j in jset:
        key = (sys_eps.epsilon, tuple(int(v) for v in j))
        if key not in row_cache:
            row_cache[key] = coefficients(f, sys_eps, r_max, js=j[None, :], safety=safety)
        single = row_cache[key]
        if template is None:
            template = single
        rows.append(single.values[0])
        floor = max(floor, single.noise_floor)
    if template is None:
        template = coefficients(f, sys_eps, r_max, js=np.zeros((0, f.d), int), safety=safety)
    values = np.vstack(rows) if rows else np.zeros((0, template.xi.shape[0]), complex)
    return CoefficientTable(
        np.atleast_2d(np.asarray(jset, dtype=int)).reshape(len(rows), f.d),
        template.ks,
        template.xi,
        values,
        sys_eps.epsilon,
        float(r_max),
        sys_eps.lambda2,
        floor,
    )


def aperture_sweep(
    f: GridSignal, query: WavefrontQuery, pair: LatticePair, apertures=(20.0, 10.0, 5.0)
) -> dict:
    """Fourier-Lebesgue verdicts over a shrinking sequence of apertures.

    Approximates the "every conical neighbourhood" quantifier: membership at
    a point and direction is witnessed only if every tested aperture stays
    divergent."""
    out = {}
    for a in apertures:
        out[float(a)] = df_fl_point(f, replace(query, aperture_deg=float(a)), pair)
    return out


# ---------------------------------------------------------------------------
# Equivalence report
# ---------------------------------------------------------------------------


@dataclass
class EquivalenceReport:
    """Comparison of the two verdict columns of an estimate."""

    n_records: int
    n_compared: int
    n_disagreements: int
    disagreements: list
    n_inconclusive_fl: int
    n_inconclusive_mod: int
    all_inconclusive_fl: bool
    all_inconclusive_mod: bool
    holds: bool

    def to_json(self) -> dict:
        return {
            "n_records": self.n_records,
            "n_compared": self.n_compared,
            "n_disagreements": self.n_disagreements,
            "disagreements": self.disagreements,
            "n_inconclusive_fl": self.n_inconclusive_fl,
            "n_inconclusive_mod": self.n_inconclusive_mod,
            "all_inconclusive_fl": self.all_inconclusive_fl,
            "all_inconclusive_mod": self.all_inconclusive_mod,
            "holds": self.holds,
        }


def check_equivalence(estimate: WavefrontEstimate) -> EquivalenceReport:
    """List every record where the two conclusive verdicts differ.

    Records with any error or an inconclusive side are excluded from the
    comparison; the equivalence claim holds iff zero exclusion-adjusted
    disagreements remain (an empty comparison set is flagged, not passed
    silently: holds stays True only when something was actually compared).
    """
    n_inc_fl = n_inc_mod = n_compared = 0
    any_fl = any_mod = False
    disagreements = []
    for i, rec in enumerate(estimate.records):
        vf, vm = rec.verdict_fl, rec.verdict_mod
        if vf is not None:
            any_fl = any_fl or vf.is_conclusive
            n_inc_fl += 0 if vf.is_conclusive else 1
        if vm is not None:
            any_mod = any_mod or vm.is_conclusive
            n_inc_mod += 0 if vm.is_conclusive else 1
        if vf is None or vm is None:
            continue
        if not (vf.is_conclusive and vm.is_conclusive):
            continue
        n_compared += 1
        if vf.kind != vm.kind:
            disagreements.append(
                {
                    "index": i,
                    "x0": rec.x0,
                    "theta": rec.theta,
                    "p": rec.p,
                    "q": rec.q,
                    "s": rec.s,
                    "fl": vf.kind,
                    "mod": vm.kind,
                }
            )
    n = len(estimate.records)
    return EquivalenceReport(
        n_records=n,
        n_compared=n_compared,
        n_disagreements=len(disagreements),
        disagreements=disagreements,
        n_inconclusive_fl=n_inc_fl,
        n_inconclusive_mod=n_inc_mod,
        all_inconclusive_fl=n > 0 and not any_fl,
        all_inconclusive_mod=n > 0 and not any_mod,
        holds=len(disagreements) == 0 and n_compared > 0,
    )
