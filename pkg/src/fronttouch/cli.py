"""Command-line surface: calibrate, simulate, replay, stats, latinsquare, serve.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import defaultdict
from pathlib import Path

from .config import DEFAULTS, MAPPING_MODES, TASKS, TECHNIQUES
from .engine import replay_events
from .mapping import DegenerateFit, fit_linear_map, read_calibration_jsonl
from .metrics import selection_aggregates, text_entry_aggregates
from .stats import holm_adjust, paired_t, rm_anova_1way
from .tasks import read_records_csv, latin_square, write_records_csv
from .trace import MonotonicityError, SchemaError, TraceHeader, read_trace, write_trace

USAGE_ERROR = 1
DATA_ERROR = 2

STUDY_TASKS = ("prestudy2", "study1", "study2")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser() -> _Parser:
    parser = _Parser(prog="fronttouch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="fit a mapping model from a calibration trace")
    p.add_argument("trace", help="JSONL of calibration samples")
    p.add_argument("--output", help="write the fitted model JSON here (default stdout)")

    p = sub.add_parser("simulate", help="generate synthetic traces and trial records")
    p.add_argument("--task", required=True, choices=TASKS + STUDY_TASKS + ("calibration",))
    p.add_argument("--technique", choices=TECHNIQUES)
    p.add_argument("--participants", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mapping-mode", choices=MAPPING_MODES)
    p.add_argument("--no-noise", action="store_true", help="zero all noise sources")
    p.add_argument("--csv", help="write trial records CSV here")
    p.add_argument("--trace-dir", help="write one trace file per session here")

    p = sub.add_parser("replay", help="replay a trace deterministically")
    p.add_argument("trace")
    p.add_argument("--csv", help="write trial records CSV here (default stdout)")

    p = sub.add_parser("stats", help="aggregate a records CSV and run the test battery")
    p.add_argument("csv")
    p.add_argument("--output", help="write the JSON report here (default stdout)")

    p = sub.add_parser("latinsquare", help="print a condition-order matrix")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("serve", help="run the live session server")
    p.add_argument("--port", type=int, default=8070)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def _cmd_calibrate(args) -> int:
    try:
        samples = read_calibration_jsonl(args.trace)
        model = fit_linear_map(samples)
    except FileNotFoundError:
        print(f"no such file: {args.trace}", file=sys.stderr)
        return DATA_ERROR
    except (DegenerateFit, ValueError) as exc:
        print(f"calibration failed: {exc}", file=sys.stderr)
        return DATA_ERROR
    text = json.dumps(model.to_json_dict(), indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    return 0


def _simulate_sessions(args):
    from . import simulate as sim

    defaults = DEFAULTS
    noise = sim.zeroed_noise(defaults) if args.no_noise else None
    if args.task in STUDY_TASKS:
        runner = {
            "prestudy2": sim.simulate_prestudy2,
            "study1": sim.simulate_study1,
            "study2": sim.simulate_study2,
        }[args.task]
        yield from runner(participants=args.participants, seed=args.seed, noise=noise, defaults=defaults)
        return
    if not args.technique:
        raise _UsageError("--technique is required for single-task simulation")
    sessions = 3 if args.task == "menu15" else 1
    for participant in range(args.participants):
        for session in range(sessions):
            header = TraceHeader(
                task=args.task,
                technique=args.technique,
                seed=args.seed,
                mapping_mode=args.mapping_mode,
                participant=participant,
                session_index=session,
            )
            yield sim.simulate_participant(header, noise=noise, defaults=defaults)


def _cmd_simulate(args) -> int:
    if args.task == "calibration":
        return _cmd_simulate_calibration(args)
    records = []
    trace_dir = Path(args.trace_dir) if args.trace_dir else None
    if trace_dir:
        trace_dir.mkdir(parents=True, exist_ok=True)
    n_sessions = 0
    try:
        for result in _simulate_sessions(args):
            n_sessions += 1
            records.extend(result.records)
            if trace_dir:
                h = result.header
                name = f"p{h.participant:02d}-{h.technique}-s{h.session_index}.jsonl"
                write_trace(trace_dir / name, h, result.events)
    except ValueError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return DATA_ERROR
    if args.csv:
        write_records_csv(args.csv, records)
    print(f"simulated {n_sessions} sessions, {len(records)} trial records", file=sys.stderr)
    if not args.csv:
        _print_records(records)
    return 0


def _cmd_simulate_calibration(args) -> int:
    from .mapping import write_calibration_jsonl
    from .simulate import simulate_calibration

    samples = simulate_calibration(participants=args.participants, seed=args.seed)
    out = Path(args.trace_dir or ".") / "calibration.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_calibration_jsonl(out, samples)
    print(f"wrote {len(samples)} calibration samples to {out}", file=sys.stderr)
    return 0


def _print_records(records) -> None:
    import csv as _csv

    from .tasks import CSV_HEADER

    writer = _csv.writer(sys.stdout)
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(r.to_csv_row())


def _cmd_replay(args) -> int:
    try:
        header, events = read_trace(args.trace)
        records, _ = replay_events(header, events)
    except FileNotFoundError:
        print(f"no such file: {args.trace}", file=sys.stderr)
        return DATA_ERROR
    except (SchemaError, MonotonicityError) as exc:
        print(f"replay failed: {exc}", file=sys.stderr)
        return DATA_ERROR
    if args.csv:
        write_records_csv(args.csv, records)
    else:
        _print_records(records)
    return 0


def _pairwise(matrix_by_tech: dict[str, dict[int, float]]) -> list[dict]:
    """Paired t-tests over participant means for every technique pair,
    Holm-adjusted across the family."""
    techs = sorted(matrix_by_tech)
    pairs = []
    for i, a in enumerate(techs):
        for b in techs[i + 1 :]:
            shared = sorted(set(matrix_by_tech[a]) & set(matrix_by_tech[b]))
            if len(shared) < 2:
                continue
            va = [matrix_by_tech[a][p] for p in shared]
            vb = [matrix_by_tech[b][p] for p in shared]
            try:
                res = paired_t(va, vb)
            except ValueError:
                continue
            pairs.append({"a": a, "b": b, "t": res.statistic, "df": res.df[0], "p": res.p_value})
    if pairs:
        adjusted = holm_adjust([p["p"] for p in pairs])
        for entry, adj in zip(pairs, adjusted):
            entry["p_holm"] = adj
    return pairs


def _participant_means(records, value) -> dict[str, dict[int, float]]:
    acc: dict[str, dict[int, list[float]]] = defaultdict(lambda: defaultdict(list))
    for r in records:
        v = value(r)
        if v is not None:
            acc[r.technique][r.participant].append(v)
    return {
        tech: {p: sum(vs) / len(vs) for p, vs in by_p.items()}
        for tech, by_p in acc.items()
    }


def _anova_over(matrix_by_tech: dict[str, dict[int, float]]) -> dict | None:
    techs = sorted(matrix_by_tech)
    if len(techs) < 2:
        return None
    shared = set.intersection(*(set(matrix_by_tech[t]) for t in techs))
    if len(shared) < 2:
        return None
    rows = [[matrix_by_tech[t][p] for t in techs] for p in sorted(shared)]
    try:
        res = rm_anova_1way(rows)
    except ValueError:
        return None
    return {"F": res.statistic, "df": list(res.df), "p": res.p_value, "conditions": techs}


def _cmd_stats(args) -> int:
    try:
        records = read_records_csv(args.csv)
    except FileNotFoundError:
        print(f"no such file: {args.csv}", file=sys.stderr)
        return DATA_ERROR
    except (ValueError, IndexError) as exc:
        print(f"bad records CSV: {exc}", file=sys.stderr)
        return DATA_ERROR
    if not records:
        print("no records", file=sys.stderr)
        return DATA_ERROR

    report: dict = {}
    by_task = defaultdict(list)
    for r in records:
        by_task[r.task].append(r)
    for task, recs in sorted(by_task.items()):
        entry: dict = {}
        if task == "keyboard":
            entry["aggregates"] = text_entry_aggregates(recs)
            from .metrics import wpm

            wpm_means = _participant_means(
                recs,
                lambda r: wpm(len(r.transcription), r.duration_s())
                if r.transcription and r.t_commit_ms > r.t_start_ms
                else None,
            )
            entry["anova_wpm"] = _anova_over(wpm_means)
            entry["pairwise_wpm"] = _pairwise(wpm_means)
        else:
            entry["aggregates"] = selection_aggregates(recs)
            time_means = _participant_means(recs, lambda r: r.duration_s())
            acc_means = _participant_means(recs, lambda r: 100.0 if r.correct else 0.0)
            entry["anova_time"] = _anova_over(time_means)
            entry["pairwise_time"] = _pairwise(time_means)
            entry["anova_accuracy"] = _anova_over(acc_means)
            entry["pairwise_accuracy"] = _pairwise(acc_means)
        report[task] = entry

    text = json.dumps(report, indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    return 0


def _cmd_latinsquare(args) -> int:
    if args.n < 1:
        print("n must be positive", file=sys.stderr)
        return DATA_ERROR
    for row in latin_square(args.n):
        print(" ".join(str(c) for c in row))
    return 0


def cli(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    try:
        if args.command == "calibrate":
            return _cmd_calibrate(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "replay":
            return _cmd_replay(args)
        if args.command == "stats":
            return _cmd_stats(args)
        if args.command == "latinsquare":
            return _cmd_latinsquare(args)
        if args.command == "serve":
            from .server import serve

            serve(port=args.port, host=args.host)
            return 0
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    raise AssertionError("unreachable")


def main() -> None:
    sys.exit(cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
