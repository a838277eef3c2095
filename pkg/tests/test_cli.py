import json
import math

import pytest

from microloc.cli import main


@pytest.fixture(scope="module")
def fixture_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("fixtures")
    assert main(["make-fixtures", "--out", str(out)]) == 0
    return out


def _payload(path):
    data = json.loads(path.read_text())
    assert set(data) == {"config", "meta", "result"}
    return data


def test_make_fixtures_manifest(fixture_dir):
    manifest = json.loads((fixture_dir / "manifest.json").read_text())
    assert set(manifest) == {"smooth_bump", "jump", "line_singularity"}
    for entry in manifest.values():
        assert (fixture_dir / entry["header"]).exists()
        assert (fixture_dir / entry["data"]).exists()


def test_analyze_smooth_bump_conclusive(fixture_dir, tmp_path):
    out = tmp_path / "report.json"
    code = main(
        [
            "analyze",
            "--signal", str(fixture_dir / "smooth_bump.json"),
            "--x0", "0.0", "--theta", "1.0",
            "--q", "2", "--s", "0.0",
            "--out", str(out),
        ]
    )
    assert code == 0
    result = _payload(out)["result"]
    assert result["fl"]["kind"] == "finite"
    assert result["mod"]["kind"] == "finite"


def test_analyze_jump_divergent(fixture_dir, tmp_path):
    out = tmp_path / "report.json"
    code = main(
        [
            "analyze",
            "--signal", str(fixture_dir / "jump.json"),
            "--x0", "0.0", "--theta", "1.0",
            "--q", "1", "--s", "1.0",
            "--out", str(out),
        ]
    )
    assert code == 0
    result = _payload(out)["result"]
    assert result["fl"]["kind"] == "divergent"
    assert result["mod"]["kind"] == "divergent"


def test_analyze_inconclusive_exit_code(fixture_dir, tmp_path):
    # the analytic boundary s = 1 - 1/q sits inside the classifier margin
    out = tmp_path / "inc.json"
    code = main(
        [
            "analyze",
            "--signal", str(fixture_dir / "jump.json"),
            "--x0", "0.0", "--theta", "1.0",
            "--q", "1", "--s", "0.0",
            "--out", str(out),
        ]
    )
    assert code == 2
    result = _payload(out)["result"]
    assert result["fl"]["kind"] == "inconclusive"


def test_scan_2d_line_singularity(fixture_dir, tmp_path):
    cfg = {
        "x_grid": [[0.0, 0.0], [2.0, 0.0]],
        "directions": [[1.0, 0.0], [0.0, 1.0]],
        "pqs": [[1.0, 1.0, 1.0]],
        "alpha": 2.5,
        "gabor_alpha": 2.0,
        "gabor_alpha1": 5.0,
        "r_max": 180.0,
    }
    cfg_path = tmp_path / "cfg2d.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "scan2d.json"
    code = main(
        [
            "scan",
            "--signal", str(fixture_dir / "line_singularity.json"),
            "--config", str(cfg_path),
            "--out", str(out),
        ]
    )
    assert code == 0
    records = _payload(out)["result"]["records"]
    by_key = {(tuple(r["x0"]), tuple(r["theta"])): r for r in records}
    assert by_key[((0.0, 0.0), (1.0, 0.0))]["fl"]["kind"] == "divergent"
    assert by_key[((0.0, 0.0), (0.0, 1.0))]["fl"]["kind"] == "finite"
    assert by_key[((2.0, 0.0), (1.0, 0.0))]["fl"]["kind"] == "finite"
    heat = (tmp_path / "scan2d_heatmap.csv").read_text().splitlines()
    assert heat[0].startswith("x0_0,x0_1,theta_deg")


def test_analyze_malformed_signal(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    (tmp_path / "bad.bin").write_bytes(b"")
    assert main(["analyze", "--signal", str(bad)]) == 1
    assert "error:" in capsys.readouterr().err


def test_analyze_validates_parameters(fixture_dir):
    code = main(
        ["analyze", "--signal", str(fixture_dir / "jump.json"), "--q", "0.5"]
    )
    assert code == 1


def test_scan_command_and_determinism(fixture_dir, tmp_path):
    cfg = {
        "x_grid": [[0.0], [1.0], [3.0]],
        "directions": [[1.0], [-1.0]],
        "pqs": [[1.0, 1.0, 1.0], [2.0, 2.0, 1.0]],
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "s1.json"
    args = ["scan", "--signal", str(fixture_dir / "jump.json"), "--config", str(cfg_path)]
    assert main(args + ["--out", str(out)]) == 0
    first = out.read_bytes()
    p1 = _payload(out)
    assert main(args + ["--out", str(out)]) == 0
    second = out.read_bytes()
    p2 = _payload(out)
    p1.pop("meta"), p2.pop("meta")
    assert json.dumps(p1, sort_keys=True) == json.dumps(p2, sort_keys=True)
    if first != second:  # only the timestamp inside "meta" may move
        diff = {i for i, (a, b) in enumerate(zip(first, second)) if a != b}
        meta_lo = first.find(b'"meta"')
        meta_hi = first.find(b'"result"')
        assert all(meta_lo <= i < meta_hi for i in diff)

    heat = tmp_path / "s1_heatmap.csv"
    assert heat.exists()
    header = heat.read_text().splitlines()[0]
    assert header.startswith("x0_0,theta_deg")

    records = p1["result"]["records"]
    assert len(records) == 12
    assert p1["result"]["equivalence"]["n_disagreements"] == 0


def test_scan_rejects_empty_directions(fixture_dir, tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"x_grid": [[0.0]], "directions": []}))
    code = main(
        ["scan", "--signal", str(fixture_dir / "jump.json"), "--config", str(cfg_path)]
    )
    assert code == 1


def test_config_file_flags_override(fixture_dir, tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"q": 1.0, "s": 1.0, "x0": [3.0], "theta": [1.0]}))
    out = tmp_path / "r.json"
    code = main(
        [
            "analyze",
            "--signal", str(fixture_dir / "jump.json"),
            "--config", str(cfg_path),
            "--x0", "0.0",  # flag must beat the config file
            "--out", str(out),
        ]
    )
    assert code == 0
    payload = _payload(out)
    assert payload["config"]["x0"] == [0.0]
    assert payload["result"]["fl"]["kind"] == "divergent"


def test_config_file_rejects_unknown_keys(fixture_dir, tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"qq": 1.0}))
    assert main(
        ["analyze", "--signal", str(fixture_dir / "jump.json"), "--config", str(cfg_path)]
    ) == 1


def test_gabor_check_exit_codes(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert main(["gabor-check", "--alpha", "1.0", "--beta", str(math.pi), "--out", str(out)]) == 0
    result = _payload(out)["result"]
    assert result["partition_deviation"] <= 1e-10
    assert result["worst_roundtrip_rel_l2"] <= 1e-6

    code = main(["gabor-check", "--alpha", "1.0", "--beta", str(2 * math.pi)])
    assert code == 1
    assert "InadmissibleParameters" in capsys.readouterr().err


def test_selftest_list_and_single_suite(tmp_path, capsys):
    assert main(["selftest", "--list"]) == 0
    names = capsys.readouterr().out.split()
    assert "fourier_oracle" in names and "wavefront_equivalence" in names

    out = tmp_path / "st.json"
    assert main(["selftest", "--only", "fourier_oracle", "--out", str(out)]) == 0
    payload = _payload(out)
    assert payload["result"]["passed"] is True

    assert main(["selftest", "--only", "not_a_suite"]) == 1


def test_selftest_rejects_corrupted_fixture(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"d": 1}')
    (tmp_path / "bad.bin").write_bytes(b"")
    assert main(["selftest", "--only", "fourier_oracle", "--signal", str(bad)]) == 1
