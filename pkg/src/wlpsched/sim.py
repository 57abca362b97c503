"""Discrete-event execution of schedules with exact rational time.

Three executors share one event loop:

* :func:`simulate_pattern` replays a precomputed pattern; a processor whose
  designated task has no pending job simply idles.
* :func:`simulate_global_edf` runs sequential jobs under global EDF or
  EDF-US[1/2].
* :func:`simulate_reduced` runs each task on its static processors and feeds
  the residual demands to one of the above on the remaining processors.

Counting rules.  A *preemption* is an execution interval of a job on one
processor ending while the job is unfinished and the job does not keep that
processor at the same instant.  A *migration* is an unfinished job resuming
on a set of processors different from the one it last ran on, or changing
its processor set while running; each change counts once.
"""

import bisect
import csv
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, gcd, lcm
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence

from .canonical import SchedulePattern, fill_pattern
from .model import TaskSystem, fmt_rat, to_rat
from .reduction import ReducedPlan, ResidualTask

Assignment = Dict["Job", FrozenSet[int]]


@dataclass(frozen=True)
class ArrivalModel:
    """How jobs are released.

    ``kind`` is ``"periodic"`` (synchronous, exactly ``T_i`` apart) or
    ``"sporadic"``: every gap is ``T_i`` plus a jitter drawn uniformly from
    the multiples of ``1/grid`` in ``[0, jitter_bound]``; the first release
    is drawn the same way.  Draws come from :class:`random.Random` (Mersenne
    Twister) seeded with ``seed``, tasks visited in index order.
    """
    kind: str = "periodic"
    jitter_bound: Fraction = Fraction(0)
    seed: int = 0
    grid: int = 100

    def __post_init__(self):
        if self.kind not in ("periodic", "sporadic"):
            raise ValueError(f"unknown arrival kind {self.kind!r}")
        object.__setattr__(self, "jitter_bound", to_rat(self.jitter_bound))
        if self.jitter_bound < 0:
            raise ValueError("jitter bound must be non-negative")


def _periods(tasks) -> Dict[int, int]:
    if isinstance(tasks, TaskSystem):
        return {i: t.period for i, t in enumerate(tasks.tasks, start=1)}
    out = {}
    for pos, t in enumerate(tasks, start=1):
        out[getattr(t, "index", pos)] = t.period
    return out


def generate_arrivals(tasks, model: ArrivalModel, horizon) -> Dict[int, List[Fraction]]:
    """Release times in ``[0, horizon)`` per task index.

    ``tasks`` is a :class:`TaskSystem` or a sequence of tasks with a
    ``period`` (and optionally an ``index``) attribute.

    >>> from wlpsched.reduction import ResidualTask
    >>> generate_arrivals([ResidualTask("a", 1, 1, 4)], ArrivalModel(), 12)
    {1: [Fraction(0, 1), Fraction(4, 1), Fraction(8, 1)]}
    """
    horizon = to_rat(horizon)
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    rng = random.Random(model.seed)
    steps = floor(model.jitter_bound * model.grid)

    def jitter():
        if model.kind == "periodic" or steps == 0:
            return Fraction(0)
        return Fraction(rng.randint(0, steps), model.grid)

    out = {}
    for idx, period in _periods(tasks).items():
        times, t = [], jitter()
        while t < horizon:
            times.append(t)
            t = t + period + jitter()
        out[idx] = times
    return out


@dataclass(eq=False)
class Job:
    task: int
    seq: int
    arrival: Fraction
    deadline: Fraction
    demand: Fraction
    remaining: Fraction = None
    delivered: Fraction = Fraction(0)
    finish: Optional[Fraction] = None
    kind: str = "job"

    def __post_init__(self):
        if self.remaining is None:
            self.remaining = self.demand

    @property
    def done(self) -> bool:
        return self.remaining == 0

    def __repr__(self):
        return f"Job({self.kind} task={self.task} #{self.seq} arr={self.arrival} rem={self.remaining})"


@dataclass(frozen=True)
class DeadlineMiss:
    task: int
    arrival: Fraction
    deadline: Fraction
    lateness: Fraction
    finished: bool


@dataclass(frozen=True)
class TraceEvent:
    time: Fraction
    kind: str
    task: int
    job: int
    processor: Optional[int] = None


@dataclass
class SimReport:
    horizon: Fraction
    deadline_misses: List[DeadlineMiss]
    preemptions: int
    migrations: int
    per_task_work: Dict[int, Fraction]
    processor_busy_time: List[Fraction]
    jobs: List[Job] = field(default_factory=list, repr=False)
    breakdown: Dict[str, int] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    trace: Optional[List[TraceEvent]] = field(default=None, repr=False)

    @property
    def jobs_released(self) -> int:
        return len(self.jobs)


class _Counter:
    """Preemption / migration bookkeeping for one population of jobs."""

    def __init__(self, trace=None):
        self.preemptions = 0
        self.migrations = 0
        self.running: Dict[Job, FrozenSet[int]] = {}
        self.last: Dict[Job, FrozenSet[int]] = {}
        self.trace = trace

    def _log(self, t, kind, job, proc=None):
        if self.trace is not None:
            self.trace.append(TraceEvent(t, kind, job.task, job.seq, proc))

    def update(self, t, assign: Assignment):
        for job, prev in self.running.items():
            new = assign.get(job, frozenset())
            if not job.done:
                for p in sorted(prev - new):
                    self.preemptions += 1
                    self._log(t, "preempt", job, p)
        for job, new in assign.items():
            prev = self.running.get(job, frozenset())
            if new == prev:
                continue
            last = self.last.get(job)
            if last is not None and new != last:
                self.migrations += 1
                self._log(t, "migrate", job, min(new - last) if new - last else None)
            for p in sorted(new - prev):
                self._log(t, "start", job, p)
            self.last[job] = new
        self.running = dict(assign)


def _run(jobs: List[Job], horizon: Fraction, m: int,
         dispatch: Callable[[Fraction, List[Job]], Assignment],
         rate: Callable[[Job, Assignment], Fraction],
         next_change: Callable[[Fraction], Optional[Fraction]],
         counters: Dict[str, Callable[[Job, FrozenSet[int]], Optional[FrozenSet[int]]]],
         on_complete: Callable[[Job, Fraction], None] = None,
         trace: Optional[list] = None):
    """Shared event loop.  Returns (counters, busy time per processor)."""
    order = sorted(jobs, key=lambda j: (j.arrival, j.task, j.seq))
    nxt = 0
    active: List[Job] = []
    busy = [Fraction(0)] * m
    ctrs = {name: _Counter(trace) for name in counters}
    t = Fraction(0)
    while True:
        while nxt < len(order) and order[nxt].arrival <= t:
            job = order[nxt]
            active.append(job)
            if trace is not None:
                trace.append(TraceEvent(t, "release", job.task, job.seq))
            nxt += 1
        if t >= horizon:
            break
        assign = dispatch(t, active)
        for name, view in counters.items():
            seen = {}
            for j, p in assign.items():
                v = view(j, p)
                if v:
                    seen[j] = v
            ctrs[name].update(t, seen)
        candidates = [horizon]
        if nxt < len(order):
            candidates.append(order[nxt].arrival)
        nc = next_change(t)
        if nc is not None:
            candidates.append(nc)
        rates = {}
        for job, procs in assign.items():
            r = rate(job, assign)
            rates[job] = r
            if r > 0:
                candidates.append(t + job.remaining / r)
        t_next = min(candidates)
        dt = t_next - t
        used = set()
        for job, procs in assign.items():
            w = rates[job] * dt
            job.remaining -= w
            job.delivered += w
            used |= procs
        for p in used:
            busy[p - 1] += dt
        t = t_next
        finished = [j for j in active if j.remaining == 0]
        if finished:
            for job in finished:
                job.finish = t
                if trace is not None:
                    trace.append(TraceEvent(t, "complete", job.task, job.seq))
                if on_complete is not None:
                    on_complete(job, t)
            active = [j for j in active if j.remaining != 0]
    return ctrs, busy


def _misses(jobs: Sequence[Job], horizon: Fraction) -> List[DeadlineMiss]:
    out = []
    for j in jobs:
        if j.finish is not None:
            if j.finish > j.deadline:
                out.append(DeadlineMiss(j.task, j.arrival, j.deadline, j.finish - j.deadline, True))
        elif j.deadline <= horizon:
            out.append(DeadlineMiss(j.task, j.arrival, j.deadline, horizon - j.deadline, False))
    return sorted(out, key=lambda d: (d.deadline, d.task))


def _make_jobs(arrivals: Dict[int, Sequence], demand: Dict[int, Fraction],
               period: Dict[int, int], horizon: Fraction, kind="job") -> List[Job]:
    jobs = []
    for i, times in arrivals.items():
        if i not in demand:
            raise KeyError(f"arrivals given for unknown task {i}")
        times = sorted(to_rat(a) for a in times)
        for a, b in zip(times, times[1:]):
            if b - a < period[i]:
                raise ValueError(f"task {i}: releases {a} and {b} closer than the period {period[i]}")
        for s, a in enumerate(times):
            if a < horizon:
                jobs.append(Job(i, s, a, a + period[i], Fraction(demand[i]), kind=kind))
    return jobs


def _work_by_task(jobs) -> Dict[int, Fraction]:
    out: Dict[int, Fraction] = {}
    for j in jobs:
        out[j.task] = out.get(j.task, Fraction(0)) + j.delivered
    return out


class _PatternTable:
    """Piecewise-constant lookup of which processors serve which task."""

    def __init__(self, pattern: SchedulePattern, offset: int = 0):
        self.L = pattern.interval_length
        self.points = pattern.breakpoints()
        self.pieces = []
        for x in self.points:
            self.pieces.append({i: frozenset(p + offset for p in procs)
                                for i, procs in pattern.assignment_at(x).items()})

    def at(self, t: Fraction) -> Dict[int, FrozenSet[int]]:
        r = t % self.L
        return self.pieces[bisect.bisect_right(self.points, r) - 1]

    def next_change(self, t: Fraction) -> Fraction:
        q = floor(t / self.L)
        r = t - q * self.L
        k = bisect.bisect_right(self.points, r)
        if k < len(self.points):
            return q * self.L + self.points[k]
        return (q + 1) * self.L


def _earliest_per_task(active: List[Job]) -> Dict[int, Job]:
    first: Dict[int, Job] = {}
    for j in active:
        cur = first.get(j.task)
        if cur is None or (j.arrival, j.seq) < (cur.arrival, cur.seq):
            first[j.task] = j
    return first


def _check_horizon(horizon, L):
    horizon = to_rat(horizon)
    if horizon <= 0 or horizon % L:
        raise ValueError(f"horizon {horizon} must be a positive multiple of the pattern length {L}")
    return horizon


def simulate_pattern(system: TaskSystem, pattern: SchedulePattern,
                     arrivals: Dict[int, Sequence], horizon,
                     trace: bool = False) -> SimReport:
    """Execute ``pattern`` against ``arrivals`` up to ``horizon``.

    Each processor runs its designated task whenever that task has a pending
    job (oldest job first); a task on ``c`` processors progresses at
    ``gamma_c``.
    """
    if pattern.processors != system.processors:
        raise ValueError("pattern and system disagree on the processor count")
    for _, seg in pattern.segments():
        if seg.task > system.n:
            raise ValueError(f"pattern refers to unknown task {seg.task}")
    horizon = _check_horizon(horizon, pattern.interval_length)
    table = _PatternTable(pattern)
    jobs = _make_jobs(arrivals, {i: t.wcet for i, t in enumerate(system.tasks, 1)},
                      {i: t.period for i, t in enumerate(system.tasks, 1)}, horizon)
    profiles = {i: t.profile for i, t in enumerate(system.tasks, 1)}
    log = [] if trace else None

    def dispatch(t, active):
        serve = table.at(t)
        return {job: serve[i] for i, job in _earliest_per_task(active).items() if i in serve}

    ctrs, busy = _run(jobs, horizon, system.processors, dispatch,
                      lambda job, assign: profiles[job.task].rate(len(assign[job])),
                      table.next_change, {"all": lambda j, p: p}, trace=log)
    c = ctrs["all"]
    return SimReport(horizon, _misses(jobs, horizon), c.preemptions, c.migrations,
                     _work_by_task(jobs), busy, jobs, trace=log)


def _edf_dispatcher(m: int, first_proc: int, key: Callable[[Job], tuple]):
    current: Dict[Job, int] = {}
    last: Dict[Job, int] = {}
    procs = list(range(first_proc, first_proc + m))

    def dispatch(t, active):
        chosen = sorted(active, key=key)[:m]
        keep = {j: current[j] for j in chosen if j in current}
        free = [p for p in procs if p not in keep.values()]
        for j in chosen:
            if j in keep:
                continue
            want = last.get(j)
            p = want if want in free else free[0]
            free.remove(p)
            keep[j] = p
        current.clear()
        current.update(keep)
        last.update(keep)
        return {j: frozenset((p,)) for j, p in keep.items()}

    return dispatch


def _edf_key(variant: str, utils: Dict[int, Fraction]):
    if variant == "plain":
        return lambda j: (j.deadline, j.task, j.arrival)
    if variant == "us-half":
        half = Fraction(1, 2)
        return lambda j: (0 if utils[j.task] > half else 1, j.deadline, j.task, j.arrival)
    raise ValueError(f"unknown EDF variant {variant!r}")


def simulate_global_edf(residual_tasks: Sequence[ResidualTask], processors: int,
                        variant: str, arrivals: Dict[int, Sequence], horizon,
                        trace: bool = False) -> SimReport:
    """Global EDF (``variant="plain"``) or EDF-US[1/2] (``"us-half"``).

    At every release and completion the ``processors`` highest-priority
    pending jobs run, one processor each.  Ties go to the lower task index,
    then the earlier release.  Running jobs keep their processor; others
    prefer the processor they last used.
    """
    horizon = to_rat(horizon)
    for r in residual_tasks:
        if r.utilization > 1:
            raise ValueError(f"{r.name}: residual tasks must be sequential (u' <= 1)")
    utils = {r.index: r.utilization for r in residual_tasks}
    jobs = _make_jobs(arrivals, {r.index: r.wcet for r in residual_tasks},
                      {r.index: r.period for r in residual_tasks}, horizon)
    log = [] if trace else None
    dispatch = _edf_dispatcher(processors, 1, _edf_key(variant, utils))
    ctrs, busy = _run(jobs, horizon, processors, dispatch, lambda job, assign: Fraction(1),
                      lambda t: None, {"all": lambda j, p: p}, trace=log)
    c = ctrs["all"]
    notes = []
    if variant == "plain":
        notes.append("plain global EDF: sum(u') <= m is necessary only, misses are possible")
    return SimReport(horizon, _misses(jobs, horizon), c.preemptions, c.migrations,
                     _work_by_task(jobs), busy, jobs, notes=notes, trace=log)


def residual_pattern(plan: ReducedPlan, interval="unit") -> SchedulePattern:
    """Canonical pattern for the residual tasks, treated as sequential
    (``gamma' = (1)``) on the residual processors, numbered from 1."""
    reduced = plan.reduced
    if interval == "gcd":
        L = gcd(*(r.period for r in reduced.residual_tasks)) or 1
    elif interval == "unit":
        L = 1
    else:
        L = interval
    for r in reduced.residual_tasks:
        if r.period % L:
            raise ValueError(f"interval length {L} does not divide period {r.period}")
    demands = []
    for r in sorted(reduced.residual_tasks, key=lambda r: -r.index):
        u = r.utilization
        demands.append((r.index, 0, u.numerator, u.denominator))
    rows = fill_pattern(demands, reduced.residual_processors, L)
    if rows is None:
        raise ValueError("residual tasks exceed the residual processors")
    return SchedulePattern(L, tuple(tuple(r) for r in rows))


def simulate_reduced(system: TaskSystem, plan: ReducedPlan, executor: str,
                     arrivals: Dict[int, Sequence], horizon, interval="unit",
                     trace: bool = False) -> SimReport:
    """Run the reduced plan.

    A pending job of ``tau_i`` always holds its ``k_i`` static processors.
    Its residual demand (``ell_i * T_i`` per job) is dispatched on the
    residual processors by ``executor`` (``"canonical"``, ``"edf"`` or
    ``"edf-us-half"``); while it holds a residual processor the job runs at
    ``gamma_{k_i+1}``, otherwise at ``gamma_{k_i}``.

    Counters are reported split into static and residual parts in
    ``breakdown``.
    """
    horizon = to_rat(horizon)
    reduced = plan.reduced
    m = system.processors
    first_res = len(reduced.static_assignment) + 1
    tasks = {i: t for i, t in enumerate(system.tasks, 1)}
    periods = {i: t.period for i, t in tasks.items()}
    jobs = _make_jobs(arrivals, {i: t.wcet for i, t in tasks.items()}, periods, horizon)
    res_tasks = {r.index: r for r in reduced.residual_tasks}
    twins: Dict[Job, Job] = {}
    res_jobs = []
    for j in jobs:
        if j.task in res_tasks:
            rj = Job(j.task, j.seq, j.arrival, j.deadline, Fraction(res_tasks[j.task].wcet),
                     kind="residual")
            twins[j] = rj
            res_jobs.append(rj)

    notes = []
    if executor == "canonical":
        pat = residual_pattern(plan, interval)
        _check_horizon(horizon, pat.interval_length)
        table = _PatternTable(pat, offset=first_res - 1)

        def res_dispatch(t, active):
            serve = table.at(t)
            return {job: serve[i] for i, job in _earliest_per_task(active).items() if i in serve}
        res_next = table.next_change
    elif executor in ("edf", "edf-us-half"):
        variant = "plain" if executor == "edf" else "us-half"
        res_dispatch = _edf_dispatcher(reduced.residual_processors, first_res,
                                       _edf_key(variant, {i: r.utilization for i, r in res_tasks.items()}))
        res_next = lambda t: None  # noqa: E731
        if variant == "plain":
            notes.append("plain global EDF on the residual tasks: sum(u') <= m' is necessary only")
    else:
        raise ValueError(f"unknown residual executor {executor!r}")

    static = {tp.task: tp.static_processors for tp in plan.tasks}

    def dispatch(t, active):
        orig = [j for j in active if j.kind == "job"]
        res = [j for j in active if j.kind == "residual"]
        assign: Assignment = res_dispatch(t, res)
        for i, job in _earliest_per_task(orig).items():
            procs = static[i] | assign.get(twins.get(job), frozenset())
            if procs:
                assign[job] = procs
        return assign

    def rate(job, assign):
        if job.kind == "residual":
            return Fraction(1)
        own = static[job.task]
        return tasks[job.task].profile.rate(len(own & assign[job]) + len(assign[job] - own))

    def on_complete(job, t):
        tw = twins.get(job)
        if tw is not None and tw.remaining:
            # original work is met; leftover residual demand is not needed
            tw.remaining = Fraction(0)
            tw.finish = t

    log = [] if trace else None
    # residual jobs are released together with their originals
    ctrs, busy = _run(jobs + res_jobs, horizon, m, dispatch, rate, res_next,
                      {"static": lambda j, p: p & static[j.task] if j.kind == "job" else None,
                       "residual": lambda j, p: p if j.kind == "residual" else None},
                      on_complete=on_complete, trace=log)

    s, r = ctrs["static"], ctrs["residual"]
    breakdown = {"static_preemptions": s.preemptions, "static_migrations": s.migrations,
                 "residual_preemptions": r.preemptions, "residual_migrations": r.migrations}
    residual_misses = _misses(res_jobs, horizon)
    breakdown["residual_deadline_misses"] = len(residual_misses)
    return SimReport(horizon, _misses(jobs, horizon), s.preemptions + r.preemptions,
                     s.migrations + r.migrations, _work_by_task(jobs), busy, jobs,
                     breakdown=breakdown, notes=notes, trace=log)


def default_horizon(system_or_tasks) -> int:
    """Ten hyperperiods."""
    return 10 * lcm(*_periods(system_or_tasks).values())


def write_trace_csv(events: Sequence[TraceEvent], fh) -> None:
    """One event per line: ``time,event,task,job,processor``; times as ``p/q``."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["time", "event", "task", "job", "processor"])
    for e in events:
        w.writerow([fmt_rat(e.time), e.kind, e.task, e.job, "" if e.processor is None else e.processor])
