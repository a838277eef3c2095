"""Command-line front end: analyze, scan, gabor-check, make-fixtures, selftest.

Parameters come from an optional JSON config file plus flags; flags win.
Every report echoes the effective configuration, with timestamps kept in a
separate `meta` block so payloads from identical runs compare byte-equal.

Exit codes: 0 success/conclusive, 1 error or failed check, 2 inconclusive
verdict (analyze).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .errors import MicrolocError
from .fixtures import random_band_limited, write_fixture_set
from .gabor import build_agp, check_partition, coefficients, reconstruct
from .selftest import SUITES, run_selftest
from .signal import load_signal
from .validation import check_exponent
from .wavefront import (
    ScanConfig,
    WavefrontQuery,
    check_equivalence,
    df_fl_point,
    df_mod_point,
    scan,
)


@dataclass
class RunConfig:
    """Effective parameters of one CLI invocation."""

    signal: str | None = None
    q: float = 1.0
    p: float = 1.0
    s: float = 1.0
    aperture_deg: float = 20.0
    alpha: float = 1.0
    beta: float = 1.0
    gabor_alpha: float | None = None
    gabor_alpha1: float | None = None
    epsilon: float | None = None
    r_max: float | None = None
    shells: int = 6
    margin: float = 0.15
    x0: list | None = None
    theta: list | None = None
    x_grid: list | None = None
    directions: list | None = None
    pqs: list | None = None
    d: int = 1
    method: str = "both"
    out: str | None = None
    seed: int = 0

    def validate(self) -> None:
        self.q = check_exponent(self.q, "q")
        self.p = check_exponent(self.p, "p")
        if not (0.0 < self.aperture_deg < 90.0):
            raise ValueError(f"aperture_deg must be in (0, 90), got {self.aperture_deg}")
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if self.epsilon is not None and not (0.0 < self.epsilon <= 1.0):
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if self.r_max is not None and self.r_max <= 0:
            raise ValueError("r_max must be positive")
        if self.shells < 4:
            raise ValueError("shells (fit window) must be at least 4")
        if self.margin <= 0:
            raise ValueError("margin must be positive")

    def to_json(self) -> dict:
        out = asdict(self)
        out["q"] = "inf" if math.isinf(self.q) else self.q
        out["p"] = "inf" if math.isinf(self.p) else self.p
        return out


def _parse_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(",", " ").split()]


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"config file {path} has unknown keys {sorted(unknown)}")
    return data


def _merge_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    for key, value in _load_config(getattr(args, "config", None)).items():
        setattr(cfg, key, value)
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            setattr(cfg, f.name, flag)
    for name in ("q", "p"):
        setattr(cfg, name, check_exponent(getattr(cfg, name), name))
    cfg.validate()
    return cfg


def _write_report(cfg: RunConfig, result: dict, default_name: str) -> Path:
    payload = {
        "config": cfg.to_json(),
        "meta": {
            "tool": "microloc",
            "version": __version__,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        },
        "result": result,
    }
    path = Path(cfg.out) if cfg.out else Path(default_name)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return path


def _scan_config(cfg: RunConfig, methods=("fl", "mod")) -> ScanConfig:
    pqs = cfg.pqs if cfg.pqs else [[cfg.p, cfg.q, cfg.s]]
    pqs = tuple(
        (check_exponent(p, "p"), check_exponent(q, "q"), float(s)) for p, q, s in pqs
    )
    return ScanConfig(
        pqs=pqs,
        aperture_deg=cfg.aperture_deg,
        alpha=cfg.alpha,
        beta=cfg.beta,
        gabor_alpha=cfg.gabor_alpha,
        gabor_alpha1=cfg.gabor_alpha1,
        epsilon=cfg.epsilon,
        r_max=cfg.r_max,
        margin=cfg.margin,
        k_last=cfg.shells,
        methods=methods,
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_analyze(args) -> int:
    cfg = _merge_config(args)
    if cfg.signal is None:
        raise ValueError("analyze needs --signal (or `signal` in the config file)")
    f = load_signal(cfg.signal)
    x0 = cfg.x0 if cfg.x0 is not None else [0.0] * f.d
    theta = cfg.theta if cfg.theta is not None else [1.0] + [0.0] * (f.d - 1)
    query = WavefrontQuery(
        x0,
        theta,
        aperture_deg=cfg.aperture_deg,
        q=cfg.q,
        p=cfg.p,
        weight=cfg.s,
        epsilon=cfg.epsilon,
        r_max=cfg.r_max,
        margin=cfg.margin,
        k_last=cfg.shells,
    )
    result: dict = {"x0": list(map(float, x0)), "theta": list(map(float, theta))}
    verdicts = []
    if cfg.method in ("fl", "both"):
        pair = _scan_config(cfg).lattice_pair(f.d)
        v = df_fl_point(f, query, pair)
        result["fl"] = v.to_json()
        verdicts.append(v)
    if cfg.method in ("mod", "both"):
        g_alpha = cfg.gabor_alpha if cfg.gabor_alpha is not None else cfg.alpha
        sys0 = build_agp(g_alpha, cfg.beta, f.d, alpha1=cfg.gabor_alpha1)
        v = df_mod_point(f, query, sys0)
        result["mod"] = v.to_json()
        verdicts.append(v)
    path = _write_report(cfg, result, "analyze_report.json")
    conclusive = all(v.is_conclusive for v in verdicts) and verdicts
    print(f"analyze: {' / '.join(v.kind for v in verdicts)} -> {path}")
    return 0 if conclusive else 2


def cmd_scan(args) -> int:
    cfg = _merge_config(args)
    if cfg.signal is None:
        raise ValueError("scan needs --signal (or `signal` in the config file)")
    f = load_signal(cfg.signal)
    if cfg.x_grid is None:
        lo, hi = f.domain_box
        mid = 0.5 * (lo + hi)
        cfg.x_grid = [mid.tolist()]
    if cfg.directions is None:
        if f.d == 1:
            cfg.directions = [[1.0], [-1.0]]
        else:
            cfg.directions = [
                [math.cos(a), math.sin(a)]
                for a in np.linspace(0.0, 2 * math.pi, 8, endpoint=False)
            ]
    if not cfg.x_grid or not cfg.directions:
        raise ValueError("scan needs nonempty x_grid and directions")
    estimate = scan(f, cfg.x_grid, cfg.directions, _scan_config(cfg))
    report = check_equivalence(estimate)
    result = {"equivalence": report.to_json(), "records": [r.to_json() for r in estimate.records]}
    path = _write_report(cfg, result, "scan_report.json")
    csv_path = Path(str(path).removesuffix(".json") + "_heatmap.csv")
    estimate.heatmap_csv(csv_path)
    print(
        f"scan: {report.n_records} records, {report.n_disagreements} disagreements, "
        f"{report.n_inconclusive_fl}+{report.n_inconclusive_mod} inconclusive -> {path}, {csv_path}"
    )
    return 0 if report.n_disagreements == 0 else 1


def cmd_gabor_check(args) -> int:
    cfg = _merge_config(args)
    sys0 = build_agp(cfg.alpha, cfg.beta, cfg.d, alpha1=cfg.gabor_alpha1)
    deviation = check_partition(sys0, n=512 if cfg.d == 1 else 64)
    rng_signals = [
        random_band_limited(n=8192 if cfg.d == 1 else 2048, bandwidth=6.0, seed=cfg.seed + i)
        for i in range(3)
    ]
    worst = 0.0
    for eps in (1.0, 0.5, 0.25):
        se = sys0.with_epsilon(eps)
        radius = 6.0 + max(320.0 / (eps * se.alpha1), 170.0)
        for f in rng_signals:
            if f.d != cfg.d:
                continue
            table = coefficients(f, se, radius)
            rec = reconstruct(table, se, f)
            rel = float(
                np.linalg.norm(rec.samples - f.samples) / np.linalg.norm(f.samples)
            )
            worst = max(worst, rel)
    ok = deviation <= 1e-10 and worst <= 1e-6
    result = {
        "partition_deviation": deviation,
        "worst_roundtrip_rel_l2": worst,
        "passed": ok,
    }
    path = _write_report(cfg, result, "gabor_check_report.json")
    print(
        f"gabor-check: partition deviation {deviation:.2e}, round trip {worst:.2e} "
        f"-> {'OK' if ok else 'FAIL'} ({path})"
    )
    return 0 if ok else 1


def cmd_make_fixtures(args) -> int:
    cfg = _merge_config(args)
    out = cfg.out or "fixtures"
    manifest = write_fixture_set(out)
    print(f"make-fixtures: wrote {sorted(manifest)} to {out}")
    return 0


def cmd_selftest(args) -> int:
    if args.list:
        for name in SUITES:
            print(name)
        return 0
    cfg = _merge_config(args)
    if cfg.signal is not None:
        load_signal(cfg.signal)  # validation only; malformed -> error exit
    names = args.only if args.only else None
    ok, results = run_selftest(names)
    result = {"passed": ok, "suites": [r.to_json() for r in results]}
    if cfg.out:
        path = _write_report(cfg, result, "selftest_report.json")
        print(f"selftest report -> {path}")
    print(f"selftest: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="microloc",
        description="Discrete wave-front sets of sampled signals.",
    )
    parser.add_argument("--version", action="version", version=f"microloc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--signal", help="signal file (header .json / .bin pair or 1D .csv)")
    common.add_argument("--config", help="JSON config file; flags override")
    common.add_argument("--q", type=str, default=None, help="frequency exponent, 1..inf")
    common.add_argument("--p", type=str, default=None, help="spatial exponent, 1..inf")
    common.add_argument("--s", type=float, default=None, help="weight exponent for <xi>^s")
    common.add_argument("--aperture-deg", dest="aperture_deg", type=float, default=None)
    common.add_argument("--alpha", type=float, default=None, help="spatial lattice step")
    common.add_argument("--beta", type=float, default=None, help="frequency lattice step")
    common.add_argument("--epsilon", type=float, default=None, help="Gabor dilation in (0,1]")
    common.add_argument("--rmax", dest="r_max", type=float, default=None)
    common.add_argument("--out", default=None, help="report path")
    common.add_argument("--seed", type=int, default=None)

    p_an = sub.add_parser("analyze", parents=[common], help="verdict at one (x0, direction)")
    p_an.add_argument("--x0", type=_parse_floats, default=None)
    p_an.add_argument("--theta", type=_parse_floats, default=None)
    p_an.add_argument("--method", choices=("fl", "mod", "both"), default=None)
    p_an.set_defaults(func=cmd_analyze)

    p_sc = sub.add_parser("scan", parents=[common], help="scan a grid of points and directions")
    p_sc.set_defaults(func=cmd_scan)

    p_gc = sub.add_parser("gabor-check", parents=[common], help="partition + round-trip check")
    p_gc.add_argument("--d", type=int, default=None, help="dimension (1 or 2)")
    p_gc.set_defaults(func=cmd_gabor_check)

    p_mf = sub.add_parser("make-fixtures", parents=[common], help="generate bundled signals")
    p_mf.set_defaults(func=cmd_make_fixtures)

    p_st = sub.add_parser("selftest", parents=[common], help="run acceptance suites")
    p_st.add_argument("--list", action="store_true", help="print suite names and exit")
    p_st.add_argument("--only", nargs="*", default=None, help="run only these suites")
    p_st.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MicrolocError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
