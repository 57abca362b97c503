"""Command-line front end.

Exit status: 0 feasible / ok, 1 infeasible (or deadline misses in a
simulation), 2 invalid input.
"""

import argparse
import json
import sys
from fractions import Fraction

from .canonical import Infeasible, build_canonical
from .feasibility import check_feasibility, edf_us_half_test
from .io import TaskSetError, decimal_str, parse_taskset
from .model import InherentlyInfeasibleError, InvalidInputError, ProfileError, fmt_rat, to_rat
from .reduction import InfeasibleSystemError, build_reduced_schedule_plan
from .render import gantt_svg, gantt_text
from .sim import (ArrivalModel, default_horizon, generate_arrivals, simulate_pattern,
                  simulate_reduced, write_trace_csv)

EXIT_OK, EXIT_INFEASIBLE, EXIT_INVALID = 0, 1, 2


def human(q) -> str:
    """``p/q (d.dddddd)``; the decimal is rounded exactly, never via float."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    approx = decimal_str(round(q, 6))
    return f"{fmt_rat(q)} ({approx})"


def _emit_json(obj, out):
    json.dump(obj, out, indent=2)
    out.write("\n")


def _inherent(exc, args, out):
    if args.format == "json":
        _emit_json({"feasible": False, "inherently_infeasible": [t.name for t in exc.tasks]}, out)
    else:
        out.write(f"INFEASIBLE: {exc}\n")
    return EXIT_INFEASIBLE


def cmd_analyze(system, args, out):
    try:
        v = check_feasibility(system)
    except InherentlyInfeasibleError as exc:
        return _inherent(exc, args, out)
    if args.format == "json":
        _emit_json({
            "processors": system.processors,
            "feasible": v.feasible,
            "load": fmt_rat(v.load),
            "capacity": v.capacity,
            "margin": fmt_rat(v.margin),
            "tasks": [{"name": t.name, "u": fmt_rat(p.utilization), "k": p.k,
                       "ell": fmt_rat(p.ell), "lambda": fmt_rat(p.lam)}
                      for t, p in zip(system.tasks, v.per_task)],
        }, out)
    else:
        rows = [("task", "C", "T", "u", "k", "ell", "lambda")]
        for t, p in zip(system.tasks, v.per_task):
            rows.append((t.name, str(t.wcet), str(t.period), human(p.utilization), str(p.k),
                         human(p.ell), human(p.lam)))
        widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
        for r in rows:
            out.write("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() + "\n")
        rel = "<=" if v.feasible else ">"
        out.write(f"\nload {human(v.load)} {rel} {v.capacity} processors, "
                  f"margin {human(v.margin)}\n")
        out.write("FEASIBLE\n" if v.feasible else "INFEASIBLE\n")
    return EXIT_OK if v.feasible else EXIT_INFEASIBLE


def _pattern_or_exit(system, args, out):
    try:
        pat = build_canonical(system, args.interval)
    except InherentlyInfeasibleError as exc:
        return None, _inherent(exc, args, out)
    if isinstance(pat, Infeasible):
        if args.format == "json":
            _emit_json({"feasible": False, "load": fmt_rat(pat.load), "capacity": pat.capacity,
                        "margin": fmt_rat(pat.margin)}, out)
        else:
            out.write(f"INFEASIBLE: load {human(pat.load)} > {pat.capacity} processors\n")
        return None, EXIT_INFEASIBLE
    return pat, EXIT_OK


def cmd_schedule(system, args, out):
    pat, code = _pattern_or_exit(system, args, out)
    if pat is None:
        return code
    if args.format == "json":
        _emit_json({
            "interval_length": pat.interval_length,
            "processors": [{"processor": j, "segments": [
                {"start": fmt_rat(s.start), "end": fmt_rat(s.end), "task": s.task,
                 "name": system.task(s.task).name} for s in row]}
                for j, row in enumerate(pat.per_processor, start=1)],
        }, out)
    else:
        out.write(f"canonical schedule, pattern length {pat.interval_length}\n")
        for j in range(pat.processors, 0, -1):
            for s in pat.per_processor[j - 1]:
                out.write(f"sigma_{j}(t) = {s.task} ({system.task(s.task).name}) "
                          f"for t in [{fmt_rat(s.start)}, {fmt_rat(s.end)})\n")
    return EXIT_OK


def cmd_reduce(system, args, out):
    try:
        plan = build_reduced_schedule_plan(system)
    except InherentlyInfeasibleError as exc:
        return _inherent(exc, args, out)
    except InfeasibleSystemError as exc:
        out.write(f"INFEASIBLE: load {human(exc.verdict.load)} > {exc.verdict.capacity}\n")
        return EXIT_INFEASIBLE
    red = plan.reduced
    avail = args.available if args.available is not None else red.residual_processors
    us = edf_us_half_test(red, avail)
    if args.format == "json":
        _emit_json({
            "static_assignment": {str(p): system.task(i).name
                                  for p, i in sorted(red.static_assignment.items())},
            "residual_processors": red.residual_processors,
            "residual_tasks": [{"name": r.name, "C": fmt_rat(r.wcet), "T": r.period,
                                "u": fmt_rat(r.utilization)} for r in red.residual_tasks],
            "edf_us_half": {"available": avail, "passes": us.passes, "bound": fmt_rat(us.bound),
                            "required_processors": us.required_processors,
                            "extra_over_reduction": us.extra_over_reduction,
                            "degenerate": us.degenerate, "sufficient_only": True},
        }, out)
    else:
        out.write("static processors:\n")
        if not red.static_assignment:
            out.write("  (none)\n")
        for p, i in sorted(red.static_assignment.items()):
            out.write(f"  p{p} -> {system.task(i).name}\n")
        out.write(f"residual tasks on m' = {red.residual_processors} processors:\n")
        for r in red.residual_tasks:
            out.write(f"  {r.name}: C' = {human(r.wcet)}, T = {r.period}, u' = {human(r.utilization)}\n")
        out.write(f"EDF-US[1/2] (sufficient test only) on {avail} processors: "
                  f"2*sum(u') - 1 = {human(us.bound)} -> "
                  f"{'passes' if us.passes else 'not shown schedulable'}; "
                  f"required {us.required_processors}, extra over m' {us.extra_over_reduction}"
                  f"{' (degenerate bound)' if us.degenerate else ''}\n")
    return EXIT_OK


def cmd_simulate(system, args, out):
    try:
        verdict = check_feasibility(system)
    except InherentlyInfeasibleError as exc:
        return _inherent(exc, args, out)
    horizon = args.horizon or default_horizon(system)
    model = ArrivalModel(args.arrivals, to_rat(args.jitter), args.seed)
    arrivals = generate_arrivals(system, model, horizon)
    want_trace = args.format == "csv"
    if args.executor == "canonical":
        pat, code = _pattern_or_exit(system, args, out)
        if pat is None:
            return code
        rep = simulate_pattern(system, pat, arrivals, horizon, trace=want_trace)
    else:
        if not verdict.feasible:
            out.write(f"INFEASIBLE: load {human(verdict.load)} > {verdict.capacity}\n")
            return EXIT_INFEASIBLE
        plan = build_reduced_schedule_plan(system)
        residual = {"reduced": "canonical", "edf": "edf", "edf-us-half": "edf-us-half"}[args.executor]
        rep = simulate_reduced(system, plan, residual, arrivals, horizon,
                               interval=args.interval, trace=want_trace)
    if args.format == "csv":
        write_trace_csv(rep.trace, out)
    elif args.format == "json":
        _emit_json({
            "executor": args.executor,
            "horizon": fmt_rat(rep.horizon),
            "jobs": rep.jobs_released,
            "deadline_misses": [{"task": system.task(d.task).name, "arrival": fmt_rat(d.arrival),
                                 "deadline": fmt_rat(d.deadline), "lateness": fmt_rat(d.lateness),
                                 "finished": d.finished} for d in rep.deadline_misses],
            "preemptions": rep.preemptions,
            "migrations": rep.migrations,
            "breakdown": rep.breakdown,
            "per_task_work": {system.task(i).name: fmt_rat(w) for i, w in sorted(rep.per_task_work.items())},
            "processor_busy_time": [fmt_rat(b) for b in rep.processor_busy_time],
            "notes": rep.notes,
        }, out)
    else:
        out.write(f"executor {args.executor}, horizon {human(rep.horizon)}, {rep.jobs_released} jobs\n")
        out.write(f"deadline misses: {len(rep.deadline_misses)}\n")
        for d in rep.deadline_misses:
            out.write(f"  {system.task(d.task).name} released {human(d.arrival)}: late by {human(d.lateness)}"
                      f"{'' if d.finished else ' (unfinished at horizon)'}\n")
        out.write(f"preemptions: {rep.preemptions}\nmigrations: {rep.migrations}\n")
        for k, v in rep.breakdown.items():
            out.write(f"  {k}: {v}\n")
        for i, w in sorted(rep.per_task_work.items()):
            out.write(f"work {system.task(i).name}: {human(w)}\n")
        for j, b in enumerate(rep.processor_busy_time, start=1):
            out.write(f"busy p{j}: {human(b)}\n")
        for note in rep.notes:
            out.write(f"note: {note}\n")
    return EXIT_INFEASIBLE if rep.deadline_misses else EXIT_OK


def cmd_gantt(system, args, out):
    if args.format not in ("text", "svg"):
        raise InvalidInputError("gantt supports --format text or svg")
    pat, code = _pattern_or_exit(system, args, out)
    if pat is None:
        return code
    out.write(gantt_svg(pat, system) if args.format == "svg" else gantt_text(pat, system))
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "schedule": cmd_schedule, "reduce": cmd_reduce,
            "simulate": cmd_simulate, "gantt": cmd_gantt}


def _interval(value):
    if value in ("unit", "gcd"):
        return value
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError("expected unit, gcd or a positive integer") from None
    if n < 1:
        raise argparse.ArgumentTypeError("interval must be positive")
    return n


def build_parser():
    p = argparse.ArgumentParser(prog="wlpsched", description=(
        "Feasibility, canonical schedules, reduction and simulation for sporadic "
        "implicit-deadline tasks with work-limited job parallelism."))
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in [("analyze", "per-task k, ell, lambda and the exact feasibility verdict"),
                        ("schedule", "canonical schedule pattern"),
                        ("reduce", "static processors, residual tasks and the EDF-US[1/2] test"),
                        ("simulate", "run a schedule against generated arrivals"),
                        ("gantt", "draw one pattern interval")]:
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("taskset", help="task-set JSON file")
        formats = {"analyze": ["text", "json"], "schedule": ["text", "json"],
                   "reduce": ["text", "json"], "simulate": ["text", "json", "csv"],
                   "gantt": ["text", "svg"]}[name]
        sp.add_argument("--format", choices=formats, default="text")
        sp.add_argument("--interval", type=_interval, default="unit",
                        help="pattern length: unit, gcd (of the periods) or an integer")
        if name == "reduce":
            sp.add_argument("--available", type=int, default=None,
                            help="processors offered to the residual tasks (default m')")
        if name == "simulate":
            sp.add_argument("--executor", choices=["canonical", "reduced", "edf", "edf-us-half"],
                            default="canonical")
            sp.add_argument("--arrivals", choices=["periodic", "sporadic"], default="periodic")
            sp.add_argument("--jitter", default="0", help="max extra delay per release (decimal)")
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--horizon", type=int, default=None,
                            help="simulated time (default 10 hyperperiods)")
        sp.add_argument("-o", "--output", default=None, help="write to a file instead of stdout")
    return p


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        system = parse_taskset(args.taskset)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                return COMMANDS[args.command](system, args, fh)
        return COMMANDS[args.command](system, args, stdout)
    except (TaskSetError, InvalidInputError, ProfileError, OSError, ValueError) as exc:
        stderr.write(f"wlpsched: error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
