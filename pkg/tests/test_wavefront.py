import dataclasses

import numpy as np
import pytest

from microloc import (
    DomainClipped,
    EpsilonTooLarge,
    ScanConfig,
    WavefrontQuery,
    aperture_sweep,
    build_agp,
    check_equivalence,
    df_fl_point,
    df_mod_point,
    scan,
)
from microloc.fixtures import line_singularity_2d
from microloc.seminorm import Verdict
from microloc.wavefront import WavefrontEstimate, WavefrontRecord, cutoff_for


@pytest.fixture(scope="module")
def line2d():
    return line_singularity_2d()


def test_smooth_bump_finite_everywhere(bump, unit_pair):
    for x0 in ([0.0], [1.2]):
        for q, s in ((2.0, 0.0), (1.0, 1.0)):
            v = df_fl_point(bump, WavefrontQuery(x0, [1.0], q=q, weight=s), unit_pair)
            assert v.kind == "finite"


def test_jump_point_verdicts(jump, unit_pair):
    v = df_fl_point(jump, WavefrontQuery([0.0], [1.0], q=1.0, weight=1.0), unit_pair)
    assert v.kind == "divergent"
    v = df_fl_point(jump, WavefrontQuery([0.0], [-1.0], q=1.0, weight=1.0), unit_pair)
    assert v.kind == "divergent"
    v = df_fl_point(jump, WavefrontQuery([3.0], [1.0], q=1.0, weight=1.0), unit_pair)
    assert v.kind == "finite"
    # localization within the cell: a point near (but off) the jump is clean
    v = df_fl_point(jump, WavefrontQuery([0.25], [1.0], q=1.0, weight=1.0), unit_pair)
    assert v.kind == "finite"


def test_df_mod_matches_fl_on_jump(jump, unit_pair):
    sys0 = build_agp(1.0, 1.0, d=1)
    for x0, expect in (([0.0], "divergent"), ([1.0], "finite")):
        q = WavefrontQuery(x0, [1.0], p=2.0, q=1.0, weight=1.0)
        assert df_mod_point(jump, q, sys0).kind == expect
        assert df_fl_point(jump, q, unit_pair).kind == expect


def test_line_singularity_directional(line2d):
    pair = ScanConfig(alpha=2.5, beta=1.0).lattice_pair(2)
    q = dict(q=1.0, weight=1.0, r_max=180.0)
    assert df_fl_point(line2d, WavefrontQuery([0, 0], [1, 0], **q), pair).kind == "divergent"
    assert df_fl_point(line2d, WavefrontQuery([0, 0], [0, 1], **q), pair).kind == "finite"
    assert df_fl_point(line2d, WavefrontQuery([2, 0], [1, 0], **q), pair).kind == "finite"


def test_cutoff_independence(jump, unit_pair):
    base = WavefrontQuery([0.0], [1.0], q=1.0, weight=1.0)
    narrow = dataclasses.replace(base, inner_frac=0.15, outer_cap_frac=0.3)
    wide = dataclasses.replace(base, inner_frac=0.4, outer_cap_frac=0.45)
    for x0 in ([0.0], [1.0], [3.0]):
        a = df_fl_point(jump, dataclasses.replace(narrow, x0=np.array(x0)), unit_pair)
        b = df_fl_point(jump, dataclasses.replace(wide, x0=np.array(x0)), unit_pair)
        assert a.kind == b.kind


def test_aperture_monotonicity(jump, unit_pair):
    # finite at 20 degrees must stay finite at every smaller aperture
    sweep = aperture_sweep(
        jump, WavefrontQuery([1.0], [1.0], q=1.0, weight=1.0), unit_pair, (20.0, 10.0, 5.0)
    )
    assert sweep[20.0].kind == "finite"
    assert all(v.kind == "finite" for v in sweep.values())


def test_direction_scale_invariance(jump, unit_pair):
    a = df_fl_point(jump, WavefrontQuery([0.0], [1.0], q=1.0, weight=1.0), unit_pair)
    b = df_fl_point(jump, WavefrontQuery([0.0], [2.0], q=1.0, weight=1.0), unit_pair)
    assert a.kind == b.kind and a.tau == b.tau


def test_cutoff_for_validation(jump, unit_pair):
    with pytest.raises(DomainClipped):
        cutoff_for(jump, unit_pair.lambda1, np.array([0.5]))  # on a cell face
    with pytest.raises(DomainClipped):
        df_fl_point(jump, WavefrontQuery([7.999], [1.0]), unit_pair)
    with pytest.raises(DomainClipped):
        df_fl_point(jump, WavefrontQuery([9.0], [1.0]), unit_pair)


def test_epsilon_too_large(jump):
    sys0 = build_agp(1.0, 1.0, d=1)
    with pytest.raises(EpsilonTooLarge):
        df_mod_point(jump, WavefrontQuery([7.0], [1.0], epsilon=1.0), sys0)


def test_scan_empty_and_singleton(jump, unit_pair):
    cfg = ScanConfig(pqs=((1.0, 1.0, 1.0),), alpha=1.0, beta=1.0)
    empty = scan(jump, [[0.0]], [], cfg)
    assert empty.records == []

    est = scan(jump, [[0.0]], [[1.0]], cfg)
    assert len(est.records) == 1
    rec = est.records[0]
    point = df_fl_point(jump, WavefrontQuery([0.0], [1.0], q=1.0, weight=1.0), unit_pair)
    assert rec.verdict_fl.kind == point.kind
    assert rec.verdict_fl.tau == pytest.approx(point.tau)


def test_scan_records_errors_without_aborting(jump):
    cfg = ScanConfig(pqs=((1.0, 1.0, 1.0),), alpha=1.0, beta=1.0)
    est = scan(jump, [[0.5], [0.0]], [[1.0]], cfg)  # first point is on a face
    assert len(est.records) == 2
    assert est.records[0].verdict_fl is None
    assert "DomainClipped" in est.records[0].error_fl
    assert est.records[1].verdict_fl is not None


def test_check_equivalence_report(jump):
    cfg = ScanConfig(pqs=((1.0, 1.0, 1.0), (2.0, 2.0, 1.0)), alpha=1.0, beta=1.0)
    est = scan(jump, [[0.0], [1.0]], [[1.0], [-1.0]], cfg)
    rep = check_equivalence(est)
    assert rep.n_records == 8
    assert rep.n_disagreements == 0
    assert rep.holds
    blob = rep.to_json()
    assert blob["n_compared"] == rep.n_compared


def test_check_equivalence_flags_all_inconclusive():
    inc = Verdict("inconclusive", None, 0.0, -1.0, 0.15, {})
    fin = Verdict("finite", 1.0, -2.0, -1.0, 0.15, {})
    records = [
        WavefrontRecord([0.0], [1.0], 1.0, 1.0, 1.0, 20.0, verdict_fl=inc, verdict_mod=fin)
    ]
    rep = check_equivalence(WavefrontEstimate(records, {}))
    assert rep.all_inconclusive_fl and not rep.all_inconclusive_mod
    assert rep.n_compared == 0 and not rep.holds


def test_heatmap_csv(tmp_path, jump):
    cfg = ScanConfig(pqs=((1.0, 1.0, 1.0),), alpha=1.0, beta=1.0)
    est = scan(jump, [[0.0], [1.0]], [[1.0], [-1.0]], cfg)
    path = est.heatmap_csv(tmp_path / "heat.csv")
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "x0_0,theta_deg,p,q,s,tau_fl,tau_mod,fl_code,mod_code"
    assert len(lines) == 5
    codes = {int(l.split(",")[-2]) for l in lines[1:]}
    assert codes <= {-1, 0, 1}


def test_query_validation():
    with pytest.raises(ValueError):
        WavefrontQuery([0.0], [0.0])  # zero direction
    with pytest.raises(ValueError):
        WavefrontQuery([0.0], [1.0], aperture_deg=95.0)
    with pytest.raises(ValueError):
        WavefrontQuery([0.0], [1.0], q=0.5)
    with pytest.raises(ValueError):
        WavefrontQuery([0.0], [1.0], epsilon=1.5)


def test_scan_config_rejects_inadmissible_pair(jump):
    cfg = ScanConfig(alpha=4.0, beta=2.0)  # product > 2*pi
    with pytest.raises(ValueError):
        cfg.lattice_pair(1)
