"""``cm`` command-line interface.

Exit codes: 0 when every verdict passes, 1 when any fails, 2 for
configuration or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ..confmap import map_from_descriptor, pull_back, push_forward, welding
from ..errors import CarlesonError, ConfigError, ParameterError
from ..geometry import JordanCurve, generate_curve, unit_circle
from ..measure import Measure, carleson_norm, default_radii, vanishing_profile
from .experiments import REGISTRY, _jsonable, run
from .report import Report, plot_profiles, render_report
from .suites import CellGrid, disk_suite

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _grid(text: str) -> tuple[int, int]:
    try:
        c, r = text.lower().split("x")
        return int(c), int(r)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected <centers>x<radii>, got {text!r}") from None


def _param(text: str):
    key, sep, val = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, json.loads(val)
    except json.JSONDecodeError:
        return key, val


def _global_flags(p: argparse.ArgumentParser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", type=Path, default=d, help="JSON config file")
    p.add_argument("--seed", type=int, default=d, help="RNG seed")
    p.add_argument("--out", type=Path, default=d, help="output directory")
    p.add_argument("--grid", type=_grid, default=d, help="norm grid as <centers>x<radii>")
    p.add_argument("--workers", type=int, default=argparse.SUPPRESS if suppress else 1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cm", description="Carleson measures under conformal and quasiconformal maps")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-curve", parents=[common], help="generate a Jordan curve as JSON")
    g.add_argument("family")
    g.add_argument("-n", type=int, default=1024)
    g.add_argument("--param", "-p", type=_param, action="append", default=[], help="family parameter key=value")

    for name, text in (("norm", "Carleson norm of a measure"), ("profile", "vanishing profile of a measure")):
        s = sub.add_parser(name, parents=[common], help=text)
        _measure_source(s)

    t = sub.add_parser("transport", parents=[common], help="transport a measure through a conformal map")
    way = t.add_mutually_exclusive_group(required=True)
    way.add_argument("--pull", action="store_true")
    way.add_argument("--push", action="store_true")
    t.add_argument("--map", required=True, help="map descriptor JSON (inline or file)")
    _measure_source(t)

    w = sub.add_parser("weld", parents=[common], help="welding homeomorphism of a curve")
    w.add_argument("--curve", type=Path, help="curve JSON file")
    w.add_argument("--family", default=None)
    w.add_argument("-n", type=int, default=1024)
    w.add_argument("--param", "-p", type=_param, action="append", default=[])

    v = sub.add_parser("verify", parents=[common], help="run an experiment")
    v.add_argument("exp_id", metavar="EXP-ID")

    r = sub.add_parser("report", parents=[common], help="summarize and re-render saved reports")
    r.add_argument("paths", nargs="*", type=Path, help="report JSON files (default: all in --out)")
    return parser


def _measure_source(p):
    p.add_argument("--measure", type=Path, help="measure JSON file")
    p.add_argument("--suite", default=None, help="suite measure on the unit disk (e.g. area, segment)")


def _load_json(text_or_path):
    path = Path(text_or_path)
    try:
        raw = path.read_text() if path.exists() else str(text_or_path)
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {text_or_path}: {exc}") from exc


def _load_measure(args) -> Measure:
    if args.measure is not None:
        if not args.measure.exists():
            raise ConfigError(f"no such measure file: {args.measure}")
        return Measure.from_dict(_load_json(args.measure))
    if args.suite is not None:
        c = args.grid[0] if args.grid else 256
        cfg = _config(args)
        cells = CellGrid(**cfg.get("cells", {})).cells()
        return disk_suite([args.suite], cells, unit_circle(c), args.seed or 0)[args.suite]
    raise ConfigError("need --measure or --suite")


def _config(args) -> dict:
    if args.config is None:
        return {}
    if not args.config.exists():
        raise ConfigError(f"no such config file: {args.config}")
    cfg = _load_json(args.config)
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _emit(args, name: str, payload) -> None:
    text = json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / name).write_text(text)
        print(args.out / name)


def _centers(args, m: Measure):
    if args.grid is None:
        return None, None
    c, r = args.grid
    idx = np.linspace(0, m.domain.n, c, endpoint=False).astype(int)
    return m.domain.samples[idx], default_radii(m.domain, r)


def cmd_gen_curve(args) -> int:
    curve = generate_curve(args.family, args.n, **dict(args.param))
    _emit(args, f"{args.family}.json", curve.to_dict())
    return EXIT_PASS


def cmd_norm(args) -> int:
    m = _load_measure(args)
    c, r = _centers(args, m)
    rep = carleson_norm(m, c, r, workers=args.workers)
    _emit(args, "norm.json", {"norm": rep.norm, "witness": {"center": rep.witness[0], "radius": rep.witness[1]}})
    return EXIT_PASS


def cmd_profile(args) -> int:
    m = _load_measure(args)
    c, r = _centers(args, m)
    prof = vanishing_profile(m, c, r, workers=args.workers)
    _emit(args, "profile.json", {"profile": prof.entries})
    return EXIT_PASS


def cmd_transport(args) -> int:
    fmap = map_from_descriptor(_load_json(args.map))
    m = _load_measure(args)
    if args.pull:
        out = pull_back(m, fmap)
    else:
        out = push_forward(m, fmap)
    _emit(args, "transported.json", out.to_dict())
    return EXIT_PASS


def cmd_weld(args) -> int:
    if args.curve is not None:
        curve = JordanCurve.from_dict(_load_json(args.curve))
    elif args.family is not None:
        curve = generate_curve(args.family, args.n, **dict(args.param))
    else:
        raise ConfigError("need --curve or --family")
    w = welding(curve)
    _emit(args, "welding.json", {"residual": w.residual, "normalization": w.normalization, "h": w.h.to_dict()})
    return EXIT_PASS


def cmd_verify(args) -> int:
    if args.exp_id not in REGISTRY:
        raise ConfigError(f"unknown experiment {args.exp_id!r}; known: {', '.join(sorted(REGISTRY))}")
    rep = run(args.exp_id, _config(args) or None, seed=args.seed, grid=args.grid, workers=args.workers)
    print(rep.summary())
    if args.out is not None:
        for kind, path in sorted(render_report(rep, args.out).items()):
            print(f"  wrote {path}")
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_report(args) -> int:
    paths = list(args.paths)
    if not paths:
        if args.out is None:
            raise ConfigError("give report files or --out <dir>")
        paths = sorted(args.out.glob("exp-*.json"))
    if not paths:
        raise ConfigError("no reports found")
    ok = True
    for p in paths:
        if not p.exists():
            raise ConfigError(f"no such report: {p}")
        rep = Report.from_dict(_load_json(p))
        print(rep.summary())
        p.with_suffix(".csv").write_text(rep.to_csv())
        plot_profiles(rep, p.with_suffix(".svg"))
        ok &= rep.passed
    return EXIT_PASS if ok else EXIT_FAIL


COMMANDS = {
    "gen-curve": cmd_gen_curve, "norm": cmd_norm, "profile": cmd_profile, "transport": cmd_transport,
    "weld": cmd_weld, "verify": cmd_verify, "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ParameterError, FileNotFoundError) as exc:
        print(f"cm: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        # invalid curves, domains and parameters are input errors
        print(f"cm: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CarlesonError as exc:
        print(f"cm: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
