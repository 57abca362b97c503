"""Canonical schedule construction and verification.

The canonical schedule is a pattern of length ``L`` repeated forever.  Tasks
are placed from ``tau_n`` down to ``tau_1``, starting on the highest-numbered
processor: each task takes ``k_i`` processors for the whole interval and one
more processor for ``ell_i * L`` time units, wrapping the partial boundary
onto the next processor down.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd
from typing import Iterable, List, Sequence, Tuple, Union

from .model import (InherentlyInfeasibleError, TaskSystem, _k_ell, derive, to_rat,
                    inherently_infeasible)

IDLE = 0


@dataclass(frozen=True)
class Segment:
    start: Fraction
    end: Fraction
    task: int

    @property
    def length(self) -> Fraction:
        return self.end - self.start


class MalformedPatternError(ValueError):
    pass


@dataclass(frozen=True)
class SchedulePattern:
    """Per-processor task assignment over ``[0, L)``, repeated with period ``L``.

    ``per_processor[j - 1]`` holds the sorted, disjoint segments of processor
    ``p_j``.  Gaps are idle time and are never stored.  A task appearing on
    several processors at the same instant runs in parallel on all of them.
    """
    interval_length: int
    per_processor: Tuple[Tuple[Segment, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "per_processor",
                           tuple(tuple(row) for row in self.per_processor))
        L = self.interval_length
        if not isinstance(L, int) or L < 1:
            raise MalformedPatternError(f"interval length must be a positive integer, got {L!r}")
        for j, row in enumerate(self.per_processor, start=1):
            prev_end = Fraction(0)
            for seg in row:
                if seg.task < 1:
                    raise MalformedPatternError(f"p_{j}: idle segments are not stored ({seg})")
                if not (0 <= seg.start < seg.end <= L):
                    raise MalformedPatternError(f"p_{j}: segment {seg} outside [0, {L})")
                if seg.start < prev_end:
                    raise MalformedPatternError(f"p_{j}: segments overlap or are unsorted at {seg}")
                prev_end = seg.end

    @classmethod
    def _trusted(cls, L, rows):
        """Skip the structural checks for builder output known to be well formed."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "interval_length", L)
        object.__setattr__(obj, "per_processor", tuple(tuple(r) for r in rows))
        return obj

    @property
    def processors(self) -> int:
        return len(self.per_processor)

    def segments(self) -> Iterable[Tuple[int, Segment]]:
        for j, row in enumerate(self.per_processor, start=1):
            for seg in row:
                yield j, seg

    def value_at(self, processor: int, t) -> int:
        """Task index on ``processor`` at time ``t`` (0 when idle)."""
        x = to_rat(t) % self.interval_length
        for seg in self.per_processor[processor - 1]:
            if seg.start <= x < seg.end:
                return seg.task
        return IDLE

    def breakpoints(self) -> List[Fraction]:
        """Sorted distinct segment boundaries in ``[0, L)``, always including 0."""
        pts = {Fraction(0)}
        for _, seg in self.segments():
            pts.add(Fraction(seg.start))
            if seg.end < self.interval_length:
                pts.add(Fraction(seg.end))
        return sorted(pts)

    def assignment_at(self, t) -> dict:
        """Map task index -> frozenset of processors running it at ``t``."""
        x = to_rat(t) % self.interval_length
        out = {}
        for j, row in enumerate(self.per_processor, start=1):
            for seg in row:
                if seg.start <= x < seg.end:
                    out.setdefault(seg.task, set()).add(j)
                    break
        return {i: frozenset(p) for i, p in out.items()}

    def rows_with_idle(self) -> List[List[Tuple[Fraction, Fraction, int]]]:
        """Each processor as a gap-free list of ``(start, end, task)``, idle as 0."""
        L = Fraction(self.interval_length)
        rows = []
        for row in self.per_processor:
            full, cur = [], Fraction(0)
            for seg in row:
                if seg.start > cur:
                    full.append((cur, Fraction(seg.start), IDLE))
                full.append((Fraction(seg.start), Fraction(seg.end), seg.task))
                cur = Fraction(seg.end)
            if cur < L:
                full.append((cur, L, IDLE))
            rows.append(full)
        return rows


@dataclass(frozen=True)
class Infeasible:
    """Certificate that no schedule exists: total processor use exceeds ``m``."""
    load: Fraction
    capacity: int

    @property
    def margin(self) -> Fraction:
        return self.capacity - self.load

    def __bool__(self):
        return False


def interval_for(system: TaskSystem, interval: Union[str, int] = "unit") -> int:
    if interval == "unit":
        return 1
    if interval == "gcd":
        return gcd(*(t.period for t in system.tasks))
    if isinstance(interval, int) and not isinstance(interval, bool) and interval >= 1:
        return interval
    raise ValueError(f"interval must be 'unit', 'gcd' or a positive integer, got {interval!r}")


def fill_pattern(demands: Sequence[Tuple[int, int, int, int]], m: int, L: int):
    """Greedy placement shared by the full and the residual schedules.

    ``demands`` lists ``(task_index, k, ell_num, ell_den)`` in placement order
    (highest index first).  Returns the per-processor segment lists, or None
    if the processors run out.
    """
    rows: List[List[Segment]] = [[] for _ in range(m)]
    zero, end = Fraction(0), Fraction(L)

    def put(j, a, b, i):
        # callers guarantee a < b
        if j < 1:
            return False
        row = rows[j - 1]
        if row and row[-1].task == i and row[-1].end == a:
            row[-1] = Segment(row[-1].start, b, i)
        else:
            row.append(Segment(a, b, i))
        return True

    # running boundary t0 kept both as reduced ints (tn / td) and as a Fraction
    j = m
    tn, td, t0 = 0, 1, zero
    for i, k, en, ed in demands:
        for _ in range(k):
            if not put(j, t0, end, i):
                return None
            if tn and not put(j - 1, zero, t0, i):
                return None
            j -= 1
        # tmp = t0 + ell * L
        num = tn * ed + en * L * td
        den = td * ed
        g = gcd(num, den)
        num, den = num // g, den // g
        if num > L * den:
            if not put(j, t0, end, i):
                return None
            j -= 1
            t0 = zero
            num -= L * den
        tmp = Fraction(num, den)
        if not put(j, t0, tmp, i):
            return None
        tn, td, t0 = num, den, tmp
        if tn == L * td:
            # boundary landed exactly on L: move on rather than keep an empty tail
            j -= 1
            tn, td, t0 = 0, 1, zero
    return rows


def build_canonical(system: TaskSystem, interval: Union[str, int] = "unit"):
    """Build the canonical schedule pattern of ``system``.

    Args:
        system: the task system.
        interval: ``"unit"`` (L = 1), ``"gcd"`` (L = gcd of the periods) or an
            explicit integer length dividing every period.

    Returns:
        A :class:`SchedulePattern`, or an :class:`Infeasible` certificate when
        the summed processor use exceeds ``m``.

    Raises:
        InherentlyInfeasibleError: a task cannot meet its demand even on all
            ``m`` processors.
    """
    L = interval_for(system, interval)
    for t in system.tasks:
        if t.period % L:
            raise ValueError(f"interval length {L} does not divide period {t.period} of {t.name}")
    tasks = system.tasks
    try:
        demands = [(i,) + _k_ell(tasks[i - 1]) for i in range(system.n, 0, -1)]
    except InherentlyInfeasibleError:
        raise InherentlyInfeasibleError(inherently_infeasible(system)) from None
    rows = fill_pattern(demands, system.processors, L)
    if rows is None:
        load = sum((derive(t).lam for t in tasks), Fraction(0))
        assert load > system.processors
        return Infeasible(load, system.processors)
    return SchedulePattern._trusted(L, rows)


@dataclass(frozen=True)
class CanonicalReport:
    is_canonical: bool
    violations: Tuple[str, ...]

    def __bool__(self):
        return self.is_canonical


def verify_canonical(pattern: SchedulePattern, system: TaskSystem) -> CanonicalReport:
    """Check the canonical-schedule conditions over one pattern interval.

    (a) on each processor the task index never increases over time, idle
    counting as 0; (b) every value on a lower processor is <= every value on
    a higher one, idle included; (c) periodicity holds by construction of
    :class:`SchedulePattern`.
    """
    problems = []
    if pattern.processors != system.processors:
        problems.append(f"pattern has {pattern.processors} processors, system has {system.processors}")
    for j, seg in pattern.segments():
        if seg.task > system.n:
            problems.append(f"p_{j}: unknown task index {seg.task}")

    rows = pattern.rows_with_idle()
    for j, row in enumerate(rows, start=1):
        for (a1, b1, v1), (a2, b2, v2) in zip(row, row[1:]):
            if v2 > v1:
                problems.append(f"(a) p_{j}: task {v2} on [{a2}, {b2}) follows task {v1} on [{a1}, {b1})")

    hi = [max(v for _, _, v in row) for row in rows]
    lo = [min(v for _, _, v in row) for row in rows]
    for j in range(len(rows)):
        for jj in range(j + 1, len(rows)):
            if hi[j] > lo[jj]:
                problems.append(f"(b) max on p_{j + 1} is {hi[j]} > min on p_{jj + 1} which is {lo[jj]}")
    return CanonicalReport(not problems, tuple(problems))


def _rate_pieces(pattern: SchedulePattern, system: TaskSystem, task: int):
    """``(start, end, rate)`` pieces in ``[0, L)`` where ``task`` runs."""
    if not 1 <= task <= system.n:
        raise IndexError(f"unknown task index {task}")
    prof = system.task(task).profile
    events = []
    for _, seg in pattern.segments():
        if seg.task == task:
            events.append((Fraction(seg.start), 1))
            events.append((Fraction(seg.end), -1))
    events.sort()
    pieces, count, prev = [], 0, None
    for x, d in events:
        if prev is not None and x > prev and count > 0:
            pieces.append((prev, x, prof.rate(count)))
        count += d
        prev = x
    return pieces


def _cumulative(pieces, L, per_period, x: Fraction) -> Fraction:
    q = floor(x / L)
    r = x - q * L
    acc = q * per_period
    for a, b, rate in pieces:
        if a >= r:
            break
        acc += (min(b, r) - a) * rate
    return acc


def work_delivered(pattern: SchedulePattern, system: TaskSystem, task: int, a, b) -> Fraction:
    """Work the pattern supplies to ``task`` over ``[a, b)``.

    The task is assumed to always have pending work, so each instant on
    ``c`` processors contributes ``gamma_c``.

    Raises:
        IndexError: unknown task index.
    """
    a, b = to_rat(a), to_rat(b)
    if b < a:
        raise ValueError("window end precedes its start")
    pieces = _rate_pieces(pattern, system, task)
    if a == b:
        return Fraction(0)
    L = pattern.interval_length
    per_period = sum(((y - x) * r for x, y, r in pieces), Fraction(0))
    return _cumulative(pieces, L, per_period, b) - _cumulative(pieces, L, per_period, a)
