"""Command line: ``newcomer <subcommand> [options]``.

Subcommands: fig1, exp1, exp2-degree, exp2-growth, profile, generate, stats.
Results go to ``--out`` (default stdout) as CSV with a header row, or JSON.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import harness
from .generators import MODELS, ModelParams
from .ingest import dataset_stats, export_events, last_snapshot, parse_policy, read_events
from .tactics import GREEDY, RsetMode, Tactic


def _ints(text: str) -> list[int]:
    """``2,4,6`` or ``2..10``."""
    out = []
    for part in text.split(","):
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _tactics(text: str) -> list[Tactic]:
    return [Tactic.parse(t) for t in text.split(",") if t]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--horizon", type=int, default=500, help="max timestamps per run")
    p.add_argument("--rset-mode", choices=[m.value for m in RsetMode], default=RsetMode.EXAMPLE.value)
    p.add_argument("--out", type=Path, help="output file (default stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")


def _model_flags(p: argparse.ArgumentParser, models: bool = False) -> None:
    if models:
        p.add_argument("--model", default=",".join(MODELS), help="comma-separated subset of " + ",".join(MODELS))
    else:
        p.add_argument("--model", choices=MODELS, default="ba")
    p.add_argument("--deg", type=int, default=6)
    p.add_argument("--size", type=int, default=500)
    p.add_argument("--growth", type=int, default=1)
    p.add_argument("--jr-p", type=float, default=0.5)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="newcomer", description="Newcomer integration into dynamic networks.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("fig1", help="worked example, all five tactics")
    _common(p)
    p.add_argument("--tactics", type=_tactics, default=list(GREEDY))

    p = sub.add_parser("exp1", help="replay an event file against each tactic")
    _common(p)
    p.add_argument("--events", type=Path, required=True)
    p.add_argument("--interval", type=int, default=1, help="events per timestamp")
    p.add_argument("--starts", type=_ints, default=[0], help="start snapshot indices, e.g. 0,10 or 0..27")
    p.add_argument("--policy", type=parse_policy, default=parse_policy("event"),
                   help="event | period:<width> | every:<n>")
    p.add_argument("--tactics", type=_tactics, default=list(GREEDY))
    p.add_argument("--wall-time", action="store_true", help="add a wall_time column (breaks byte-identity)")

    for name, helptext in (("exp2-degree", "sweep average degree, growth fixed"),
                           ("exp2-growth", "sweep growth rate, degree fixed")):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        _model_flags(p, models=True)
        if name == "exp2-degree":
            p.add_argument("--degrees", type=_ints, default=list(range(2, 11)))
        else:
            p.add_argument("--growths", type=_ints, default=[10, 50, 100, 200, 500])
        p.add_argument("--tactics", type=_tactics, default=list(GREEDY))
        p.add_argument("--jobs", type=int, default=1, help="worker processes (results do not depend on it)")
        p.add_argument("--summary", type=Path, help="summary CSV (default: <out>.summary.csv when --out is set)")
        p.add_argument("--wall-time", action="store_true", help="add a wall_time column (breaks byte-identity)")

    p = sub.add_parser("profile", help="size, diameter, center diameter and reference distance per snapshot")
    _common(p)
    _model_flags(p)
    p.add_argument("--events", type=Path, help="profile an event file instead of a model")
    p.add_argument("--policy", type=parse_policy, default=parse_policy("event"))
    p.add_argument("--ref", type=int, default=0, help="reference vertex")
    p.add_argument("--steps", type=int, help="model steps (default: grow to --size)")

    p = sub.add_parser("generate", help="export a model's growth as an event file")
    _common(p)
    _model_flags(p)
    p.add_argument("--steps", type=int, help="model steps (default: grow to --size)")

    p = sub.add_parser("stats", help="statistics of the last snapshot of an event file")
    _common(p)
    p.add_argument("--events", type=Path, required=True)
    p.add_argument("--policy", type=parse_policy, default=parse_policy("event"))
    p.add_argument("--cp-samples", type=int, default=20, help="null-model samples for cp (0 skips it)")
    p.add_argument("--labels", type=Path, help="write the label table here")
    return ap


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _read(path: Path):
    if not path.exists():
        raise SystemExit(f"error: no such file {path}")
    with path.open() as f:
        return read_events(f)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    mode = RsetMode(args.rset_mode) if hasattr(args, "rset_mode") else RsetMode.EXAMPLE
    if getattr(args, "trials", 1) < 1:
        raise SystemExit("error: --trials must be >= 1")

    if args.cmd == "fig1":
        rows, notes, ok = harness.cmd_fig1(args.tactics, mode, args.horizon)
        _emit(harness.write_rows(rows, ["tactic", "cost", "entered_at", "edges_built", "horizon"], args.format),
              args.out)
        for n in notes:
            print("note:", n, file=sys.stderr)
        if not ok:
            print("error: RMax/RBtw cost differs from 2", file=sys.stderr)
        return 0 if ok else 1

    if args.cmd == "exp1":
        stream = _read(args.events)
        rows = harness.cmd_experiment1(stream.events, args.events.name, args.starts, args.interval, args.tactics,
                                       args.policy, args.horizon, mode, args.wall_time)
        _emit(harness.write_rows(rows, harness.result_columns(args.wall_time), args.format), args.out)
        return 0

    if args.cmd in ("exp2-degree", "exp2-growth"):
        models = [m for m in args.model.split(",") if m]
        degrees = args.degrees if args.cmd == "exp2-degree" else [args.deg]
        growths = args.growths if args.cmd == "exp2-growth" else [args.growth]
        rows = harness.cmd_experiment2(args.cmd, models, degrees, growths, args.tactics, args.trials, args.seed,
                                       args.size, args.jr_p, args.horizon, mode, args.jobs, args.wall_time)
        _emit(harness.write_rows(rows, harness.result_columns(args.wall_time), args.format), args.out)
        summary_path = args.summary
        if summary_path is None and args.out is not None:
            summary_path = args.out.with_suffix(".summary.csv")
        if summary_path is not None:
            summary_path.write_text(harness.write_rows(harness.summarize(rows), harness.SUMMARY_COLUMNS))
        return 0

    if args.cmd == "profile":
        if args.events is not None:
            rows = harness.cmd_profile_events(_read(args.events).events, args.policy, args.ref)
        else:
            params = ModelParams(args.model, d=args.deg, N=args.size, growth=args.growth, jr_p=args.jr_p)
            rows = harness.cmd_profile_model(params, args.seed, args.ref, args.steps)
        _emit(harness.write_rows(rows, harness.PROFILE_COLUMNS, args.format), args.out)
        return 0

    if args.cmd == "generate":
        params = ModelParams(args.model, d=args.deg, N=args.size, growth=args.growth, jr_p=args.jr_p)
        _emit(export_events(harness.generate_events(params, args.seed, args.steps)), args.out)
        return 0

    if args.cmd == "stats":
        stream = _read(args.events)
        g, count = last_snapshot(stream.events, args.policy)
        st = dataset_stats(g, count, args.cp_samples, args.seed)
        _emit(st.to_json() + "\n" if args.format == "json" else st.to_csv(), args.out)
        if args.labels is not None:
            with args.labels.open("w") as f:
                stream.labels.write(f)
        for k, v in sorted(stream.warnings.items()):
            print(f"warning: {v} {k.replace('_', ' ')} event(s) skipped", file=sys.stderr)
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
