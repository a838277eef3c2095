import math

import numpy as np
import pytest

from microloc import (
    Cone,
    ConeSumSeries,
    TooFewShells,
    Weight,
    build_agp,
    classify,
    coefficients,
    continuous_fl_series,
    discrete_fl_series,
    discrete_mod_series,
    make_cutoff,
    multiply,
    scaled_integer_lattice,
    support_index_set,
)
from microloc.errors import MissingCoefficients
from microloc.fixtures import jump_1d, jump_1d_in_cell
from microloc.seminorm import shell_boundaries


def _synthetic(sigma, q=1.0, d=1, n_shells=8, r0=4.0):
    """Series whose width-normalized shell density follows R^sigma exactly."""
    bounds = r0 * 2.0 ** np.arange(n_shells + 1)
    upper = bounds[1:]
    widths = np.diff(bounds)
    a = upper**sigma * widths
    if math.isinf(q):
        a = upper**sigma
        s = np.maximum.accumulate(a)
    else:
        s = np.cumsum(a)
    counts = np.maximum((upper**d).astype(int), 1)
    absmax = np.ones(n_shells)
    return ConeSumSeries(
        bounds, a, s, counts, absmax, q, d, 0.0, {"noise_floor": 0.0}
    )


def test_shell_boundaries():
    b = shell_boundaries(4.0, 700.0)
    assert b.tolist() == [4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0]
    with pytest.raises(ValueError):
        shell_boundaries(4.0, 7.9)


def test_classify_recovers_exact_exponent():
    for q in (1.0, 2.0):
        for tau in (-2.0, -0.7, 0.4):
            sigma = q * tau + (1 - 1)  # d = 1
            v = classify(_synthetic(sigma, q=q))
            assert v.tau == pytest.approx(tau, abs=1e-9)
    v = classify(_synthetic(0.5, q=math.inf))
    assert v.tau == pytest.approx(0.5, abs=1e-9)


def test_classify_thresholds_and_margin():
    # for d = 1 the synthetic slope sigma maps to tau = sigma / q
    d, q = 1, 2.0
    thr = -d / q
    assert classify(_synthetic(q * (thr - 0.3), q=q)).kind == "finite"
    assert classify(_synthetic(q * (thr + 0.3), q=q)).kind == "divergent"
    assert classify(_synthetic(q * (thr + 0.05), q=q)).kind == "inconclusive"
    assert classify(_synthetic(q * (thr - 0.05), q=q)).kind == "inconclusive"


def test_classify_zero_series_is_finite_zero():
    ser = _synthetic(-1.0)
    zero = ConeSumSeries(
        ser.boundaries, 0 * ser.a, 0 * ser.S, ser.counts, 0 * ser.shell_absmax,
        1.0, 1, 0.0, {"noise_floor": 0.0},
    )
    v = classify(zero)
    assert v.kind == "finite" and v.value == 0.0


def test_classify_too_few_shells():
    ser = _synthetic(-1.0, n_shells=3)
    with pytest.raises(TooFewShells):
        classify(ser)
    with pytest.raises(ValueError):
        classify(_synthetic(-1.0), k_last=3)


def test_classify_floor_rule():
    ser = _synthetic(1.0)  # divergent-looking slope
    floored = ConeSumSeries(
        ser.boundaries, ser.a, ser.S, ser.counts, 1e-18 * np.ones(ser.n_shells),
        1.0, 1, 0.0, {"noise_floor": 1e-12},
    )
    v = classify(floored)
    assert v.kind == "finite"
    assert v.diagnostics["reason"] == "tail below quadrature noise floor"


def test_classify_cauchy_downgrade():
    # huge settled mass, then a tiny growing tail: the slope says divergent
    # but the partial sums are flat, so the verdict degrades to inconclusive
    bounds = 4.0 * 2.0 ** np.arange(9)
    upper = bounds[1:]
    widths = np.diff(bounds)
    a = 1e-9 * upper**2 * widths
    a[0] = 1e6
    s = np.cumsum(a)
    ser = ConeSumSeries(
        bounds, a, s, np.ones(8, int) * 100, np.ones(8), 1.0, 1, 0.0,
        {"noise_floor": 0.0},
    )
    v = classify(ser)
    assert v.kind == "inconclusive"
    assert "stabilized" in v.diagnostics["reason"]


def test_jump_series_examples(jump, unit_pair):
    cone = Cone.from_degrees([1.0], 20.0)
    lam2 = unit_pair.lambda2
    chi = make_cutoff(([-0.1], [0.1]), ([-0.4], [0.4]))
    g = multiply(jump, chi)

    v = classify(discrete_fl_series(g, Weight.bracket_power(0.0), 2.0, cone, lam2, 716.0))
    assert v.kind == "finite"
    assert v.tau == pytest.approx(-1.0, abs=0.1)

    v = classify(discrete_fl_series(g, Weight.bracket_power(1.0), 1.0, cone, lam2, 716.0))
    assert v.kind == "divergent"
    assert v.tau == pytest.approx(0.0, abs=0.1)


def test_smooth_bump_series_rapid_decay(bump, unit_pair):
    cone = Cone.from_degrees([1.0], 20.0)
    ser = discrete_fl_series(
        bump, Weight.bracket_power(0.0), 2.0, cone, unit_pair.lambda2, 716.0
    )
    v = classify(ser)
    assert v.kind == "finite"
    assert v.tau is None or v.tau < -3.0


def test_series_monotone_in_aperture(jump, unit_pair):
    lam2 = unit_pair.lambda2
    w = Weight.bracket_power(0.0)
    small = discrete_fl_series(jump, w, 1.0, Cone.from_degrees([1.0], 10.0), lam2, 200.0)
    large = discrete_fl_series(jump, w, 1.0, Cone.from_degrees([1.0], 40.0), lam2, 200.0)
    assert np.all(large.S >= small.S - 1e-15)
    assert np.all(np.diff(small.S) >= -1e-15)  # partial sums nondecreasing


def test_weight_shift_moves_tau(jump, unit_pair):
    cone = Cone.from_degrees([1.0], 20.0)
    chi = make_cutoff(([-0.12], [0.12]), ([-0.45], [0.45]))
    g = multiply(jump, chi)
    for q in (1.0, 2.0):
        base = classify(
            discrete_fl_series(g, Weight.bracket_power(0.0), q, cone, unit_pair.lambda2, 716.0)
        ).tau
        for t in (1.0, 2.0):
            shifted = classify(
                discrete_fl_series(g, Weight.bracket_power(t), q, cone, unit_pair.lambda2, 716.0)
            ).tau
            assert shifted - base == pytest.approx(t, abs=0.05)


def test_continuous_matches_discrete_classification(unit_pair):
    f = jump_1d_in_cell()
    cone = Cone.from_degrees([1.0], 20.0)
    for q, s, expected in [(1.0, 1.0, "divergent"), (2.0, 0.0, "finite")]:
        w = Weight.bracket_power(s)
        vd = classify(discrete_fl_series(f, w, q, cone, unit_pair.lambda2, 716.0))
        vc = classify(continuous_fl_series(f, w, q, cone, 4.0, 716.0, r0=4.0))
        assert vd.kind == expected and vc.kind == expected


def test_discrete_mod_series_reductions():
    sys0 = build_agp(1.0, 1.0, d=1).with_epsilon(0.125)
    f = jump_1d()
    x0 = np.array([0.0])
    jset = support_index_set(sys0, x0)
    table = coefficients(f, sys0, 716.0, js=jset)
    cone = Cone.from_degrees([1.0], 20.0)
    w = Weight.bracket_power(1.0)
    lam2 = sys0.lambda2

    empty = discrete_mod_series(table, w, 1.0, 1.0, cone, lam2, np.zeros((0, 1), int))
    assert classify(empty).kind == "finite" and classify(empty).value == 0.0

    # a single j reduces to the windowed scalar series, up to (2 pi)^(d/2)
    j0 = jset[len(jset) // 2][None, :]
    single = discrete_mod_series(table, w, 1.0, 1.0, cone, lam2, j0)
    g = multiply(f, sys0.psi_window(j0[0]))
    scalar = discrete_fl_series(g, w, 1.0, cone, lam2, 716.0)
    scale = (2 * math.pi) ** 0.5
    assert np.allclose(single.a, scale * scalar.a, rtol=1e-9)

    # p = q collapses to a plain double sum over the covered shells
    both = discrete_mod_series(table, w, 2.0, 2.0, cone, lam2, jset)
    mask = cone.contains(table.xi)
    direct = np.abs(table.values[:, mask]) * w(table.xi[mask])[None, :]
    radii = np.linalg.norm(table.xi[mask], axis=1)
    in_shells = (radii > both.boundaries[0]) & (radii <= both.boundaries[-1])
    expected_total = float(np.sum(direct[:, in_shells] ** 2))
    assert both.S[-1] - both.core == pytest.approx(expected_total, rel=1e-9)

    with pytest.raises(MissingCoefficients):
        discrete_mod_series(table, w, 1.0, 1.0, cone, lam2, np.array([[999]]))
    with pytest.raises(MissingCoefficients):
        discrete_mod_series(table, w, 1.0, 1.0, cone, scaled_integer_lattice(0.7, 1), jset)


def test_series_csv_export(tmp_path, jump, unit_pair):
    cone = Cone.from_degrees([1.0], 20.0)
    ser = discrete_fl_series(
        jump, Weight.bracket_power(0.0), 2.0, cone, unit_pair.lambda2, 200.0
    )
    path = ser.to_csv(tmp_path / "series.csv")
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "R_m,a_m,S_m"
    assert len(lines) == 1 + ser.n_shells


def test_verdict_json(jump, unit_pair):
    cone = Cone.from_degrees([1.0], 20.0)
    v = classify(
        discrete_fl_series(jump, Weight.bracket_power(0.0), 2.0, cone, unit_pair.lambda2, 716.0)
    )
    blob = v.to_json()
    assert blob["kind"] == v.kind and blob["code"] in (-1, 0, 1)
    assert "sigma" in blob["diagnostics"]
