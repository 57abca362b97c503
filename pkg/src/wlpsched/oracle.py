"""Brute-force references for tiny instances.

These deliberately avoid the closed-form quantities (``k``, ``ell``,
``lambda``) and search exhaustively over a grid instead.  They exist to
cross-check the analysis and are not part of the public API.
"""

from fractions import Fraction
from itertools import product
from math import lcm

import numpy as np

from .model import Task, TaskSystem

MAX_TASKS = 3
MAX_PROCESSORS = 3
MAX_HYPERPERIOD = 12
MAX_SLOTS_PER_UNIT = 16


class NoFeasibleAllocation(ValueError):
    """No grid allocation delivers the task's demand."""


class OracleSizeError(ValueError):
    """Instance too large for exhaustive search."""


def _common_denominator(values):
    return lcm(*(Fraction(v).denominator for v in values))


def brute_force_min_use(task: Task, grid_denominator: int) -> Fraction:
    """Minimum processor use per time unit over a grid of allocations.

    Searches every vector ``a`` (time spent on exactly ``j`` processors, each
    entry a multiple of ``1/grid_denominator``) with ``sum(a) <= 1`` and
    ``sum(gamma_j * a_j) >= u``, returning the smallest ``sum(j * a_j)``.

    The search is an exact dynamic program over (time slots used, processor
    use), which enumerates the same space as nested loops without their
    cost.
    """
    g = grid_denominator
    if g < 10:
        raise ValueError("grid_denominator must be at least 10")
    gammas = list(task.profile.gammas)
    m = len(gammas)
    u = task.utilization
    D = _common_denominator(gammas + [u])
    work = [int(x * D) for x in gammas]
    target = int(u * D) * g
    if target > work[-1] * g:
        raise NoFeasibleAllocation(f"{task.name}: u={u} exceeds gamma_m={gammas[-1]}")
    if max(work) * g >= 2 ** 62:
        raise OracleSizeError("profile denominators too large for the grid search")

    use_max = m * g
    # best[t, p]: max work with t slots used and processor-use p (slot units)
    best = np.full((g + 1, use_max + 1), -1, dtype=np.int64)
    best[0, 0] = 0
    for j, w in enumerate(work, start=1):
        for t in range(g):
            src = best[t, :use_max + 1 - j]
            cand = np.where(src >= 0, src + w, -1)
            dst = best[t + 1, j:]
            np.maximum(dst, cand, out=dst)
    reach = best.max(axis=0)
    hits = np.nonzero(reach >= target)[0]
    return Fraction(int(hits[0]), g)


def _pareto_min(states):
    """Drop states dominated componentwise by another state."""
    states = list(states)
    if len(states) < 2:
        return states
    arr = np.array(states, dtype=np.int64)
    keep = np.ones(len(arr), dtype=bool)
    for lo in range(0, len(arr), 256):
        block = arr[lo:lo + 256]
        # le[i, j]: state j <= block state i everywhere; states are distinct,
        # so any j != i with that property strictly dominates i
        le = (arr[None, :, :] <= block[:, None, :]).all(axis=2)
        keep[lo:lo + 256] = le.sum(axis=1) == 1
    return [states[i] for i in np.nonzero(keep)[0]]


def _splits(m, k):
    """All ways to hand all ``m`` processors to ``k`` tasks."""
    if k == 0:
        return [()]
    return [c for c in product(range(m + 1), repeat=k) if sum(c) == m]


def exhaustive_feasible(system: TaskSystem, time_slots_per_unit: int) -> bool:
    """Search every slot-quantized schedule over one hyperperiod.

    Each slot of length ``1/time_slots_per_unit`` hands the processors out
    among tasks; a task on ``c`` processors earns ``gamma_c`` per unit time.
    Jobs are released synchronously and periodically.  Returns True iff some
    assignment gives every job its full WCET inside its period window.

    Only Pareto-minimal vectors of remaining demand are kept between slots;
    giving idle processors to a task with pending work never hurts, so only
    splits using all processors among pending tasks are tried.

    Raises:
        OracleSizeError: instance exceeds the size caps.
    """
    n, m, s = system.n, system.processors, time_slots_per_unit
    P = system.hyperperiod()
    if n > MAX_TASKS or m > MAX_PROCESSORS or P > MAX_HYPERPERIOD or not 1 <= s <= MAX_SLOTS_PER_UNIT:
        raise OracleSizeError(
            f"instance n={n}, m={m}, hyperperiod={P}, slots={s} exceeds caps "
            f"({MAX_TASKS}, {MAX_PROCESSORS}, {MAX_HYPERPERIOD}, {MAX_SLOTS_PER_UNIT})")
    D = _common_denominator([g for t in system.tasks for g in t.profile.gammas])
    # per-slot work on c processors, scaled by D * s to stay integral
    gain = [[0] + [int(g * D) for g in t.profile.gammas] for t in system.tasks]
    full = [t.wcet * D * s for t in system.tasks]
    win = [t.period * s for t in system.tasks]

    splits = {k: _splits(m, k) for k in range(n + 1)}
    states = [tuple(full)]
    for slot in range(P * s):
        if slot:
            nxt = []
            for st in states:
                ok = True
                st = list(st)
                for i in range(n):
                    if slot % win[i] == 0:
                        if st[i]:
                            ok = False
                            break
                        st[i] = full[i]
                if ok:
                    nxt.append(tuple(st))
            states = _pareto_min(set(nxt))
            if not states:
                return False
        new = set()
        for st in states:
            pending = [i for i in range(n) if st[i] > 0]
            for split in splits[len(pending)]:
                ns = list(st)
                for i, c in zip(pending, split):
                    ns[i] = max(0, ns[i] - gain[i][c])
                # the rest of this window must be able to cover what is left
                left = [win[i] - 1 - slot % win[i] for i in range(n)]
                if all(ns[i] <= left[i] * gain[i][m] for i in range(n)):
                    new.add(tuple(ns))
        states = _pareto_min(new)
        if not states:
            return False
    return any(all(x == 0 for x in st) for st in states)
