"""Acceptance gate: every package-level criterion at its stated tolerance.

Each test runs one suite from microloc.selftest and prints a PASS/FAIL line;
the same suites back the `microloc selftest` command.
"""

from microloc.selftest import SUITES


def _run(name):
    result = SUITES[name]()
    state = "PASS" if result.passed else "FAIL"
    print(f"[{state}] {name} ({result.duration_s:.1f}s): {result.details}")
    return result


def test_criterion_1_gabor_duality():
    res = _run("gabor_duality")
    assert res.details["n_round_trips"] == 600
    assert res.details["worst_partition_deviation"] <= 1e-10
    assert res.details["worst_roundtrip_rel_l2"] <= 1e-6
    assert res.passed


def test_criterion_2_fourier_oracle():
    res = _run("fourier_oracle")
    assert res.details["triangle_max_err"] <= 1e-6
    assert res.details["gaussian_max_err"] <= 1e-8
    assert res.passed


def test_criterion_3_continuous_crosscheck():
    res = _run("continuous_crosscheck")
    assert res.details["violations"] == []
    assert res.details["n_checks"] >= 27  # 3 signals x 3 cone pairs x >= 3 (q, s)
    assert res.passed


def test_criterion_4_singularity_ground_truth():
    res = _run("ground_truth")
    assert res.details["misses"] == []
    assert res.details["n_conclusive"] > 0
    assert res.passed


def test_criterion_5_wavefront_equivalence():
    res = _run("wavefront_equivalence")
    assert res.details["n_records"] >= 200
    assert res.details["n_compared"] > 0
    assert res.details["n_disagreements"] == 0
    assert res.passed


def test_criterion_6_norm_equivalence():
    res = _run("norm_equivalence")
    assert res.details["worst_ratio"] <= 10.0
    assert res.passed


def test_criterion_7_classifier_sanity():
    res = _run("classifier_sanity")
    assert res.details["worst_weight_shift_error"] <= 0.05
    assert res.details["inconclusive_rate"] <= 0.10
    assert res.passed
