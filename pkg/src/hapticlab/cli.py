"""Command line: `lab run`, `lab replay`, `lab gain`."""
from __future__ import annotations

import argparse
import os
import sys
from typing import Optional

from .assessment import ScoreParseError, group_gain, load_scores
from .labconfig import ConfigError, parse_config
from .session import SessionFormatError, SessionIntegrityError, read_header, iter_ticks, verify_replay


def _run_overrides(args) -> dict:
    out = {}
    if args.scenario:
        out["scenario"] = args.scenario
    if args.variant:
        out["coriolis.variant"] = args.variant
    if args.port is not None:
        out["port"] = args.port
    if args.rate is not None:
        out["servo.rate_hz"] = args.rate
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError([f"--set expects key=value, got {item!r}"])
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def cmd_run(args) -> int:
    fallbacks = {}
    env_port = os.environ.get("LAB_PORT")
    if env_port is not None:
        fallbacks["port"] = env_port
    try:
        cfg = parse_config(args.config, overrides=_run_overrides(args), fallbacks=fallbacks)
    except ConfigError as exc:
        for v in exc.violations:
            print(f"config error: {v}", file=sys.stderr)
        return 2

    device = args.device
    if device == "ws":
        from .service import serve
        ui = args.ui if args.ui and os.path.isdir(args.ui) else None
        print(f"serving {cfg.scenario} on ws://127.0.0.1:{cfg.port}/ws")
        serve(cfg, record_path=args.record, ui_dir=ui)
        return 0

    from .service import run_headless
    if device.startswith("script:"):
        report = run_headless(cfg, device[len("script:"):], args.ticks,
                              record_path=args.record)
    elif device.startswith("replay:"):
        report = run_headless(cfg, None, args.ticks, record_path=args.record,
                              replay_path=device[len("replay:"):])
    else:
        print(f"unknown device {device!r}; use ws, script:FILE or replay:FILE",
              file=sys.stderr)
        return 2
    print(f"ticks: {report.ticks} ({report.end_reason})")
    print(f"final state hash: {report.final_hash}")
    if report.record_path:
        print(f"session log: {report.record_path}")
    return 0


def cmd_replay(args) -> int:
    try:
        if args.verify:
            report = verify_replay(args.input)
            if report.match:
                print(f"match=true ticks={report.ticks_checked}")
                return 0
            print(f"match=false first_divergent_tick={report.first_divergent_tick}")
            return 1
        header = read_header(args.input)
        n = sum(1 for _ in iter_ticks(args.input))
        print(f"scenario: {header.scenario}  dt: {header.dt}  ticks: {n}")
        return 0
    except (SessionFormatError, SessionIntegrityError, ConfigError) as exc:
        print(f"replay error: {exc}", file=sys.stderr)
        return 2


def cmd_gain(args) -> int:
    try:
        records = load_scores(args.csv)
    except ScoreParseError as exc:
        for p in exc.problems:
            print(f"parse error: {p}", file=sys.stderr)
        return 2
    reports = group_gain(records, aggregation=args.agg)
    print(f"{'group':<10} {'n':>4} {'mean_gain':>10}  excluded  ({args.agg})")
    for name, rep in reports.items():
        print(f"{name:<10} {rep.n:>4} {rep.mean_gain:>10.3f}  {len(rep.excluded)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lab", description="haptic virtual laboratory")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a lab (service or headless)")
    run.add_argument("--scenario", choices=["friction", "coriolis", "precession"])
    run.add_argument("--variant", choices=["ball", "glider"])
    run.add_argument("--device", default="ws",
                     help="ws | script:FILE | replay:FILE (default ws)")
    run.add_argument("--config", help="JSON config file")
    run.add_argument("--port", type=int)
    run.add_argument("--record", help="write session log to FILE")
    run.add_argument("--rate", type=float, help="servo rate, Hz")
    run.add_argument("--ticks", type=int, default=10000, help="headless tick count")
    run.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override any config key")
    run.add_argument("--ui", default="frontend", help="static UI directory (index.html + dist/)")
    run.set_defaults(fn=cmd_run)

    rep = sub.add_parser("replay", help="inspect or verify a session log")
    rep.add_argument("--in", dest="input", required=True)
    rep.add_argument("--verify", action="store_true")
    rep.set_defaults(fn=cmd_replay)

    gain = sub.add_parser("gain", help="normalized learning gains from a score CSV")
    gain.add_argument("--csv", required=True)
    gain.add_argument("--agg", choices=["per-student", "group-mean"], default="per-student")
    gain.set_defaults(fn=cmd_gain)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        for v in exc.violations:
            print(f"config error: {v}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
