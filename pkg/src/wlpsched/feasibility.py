"""Exact feasibility test, minimum processor count and the EDF-US[1/2] test."""

from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import List, Optional, Sequence

from .model import (DerivedParams, InherentlyInfeasibleError, Task, TaskSystem,
                    derive_all)


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool
    load: Fraction
    capacity: int
    margin: Fraction
    per_task: List[DerivedParams]


def check_feasibility(system: TaskSystem) -> FeasibilityVerdict:
    """Decide feasibility exactly: the system is feasible iff the summed
    processor use ``sum(k_i + ell_i)`` does not exceed ``m``.

    Raises:
        InherentlyInfeasibleError: some task has ``u_i > gamma_{i,m}``.
    """
    params = derive_all(system)
    load = sum((p.lam for p in params), Fraction(0))
    m = system.processors
    return FeasibilityVerdict(load <= m, load, m, m - load, params)


def min_processors(tasks: Sequence[Task]) -> Optional[int]:
    """Smallest ``m`` (up to the profile length) on which ``tasks`` are feasible.

    Each trial ``m`` uses the length-``m`` prefix of every profile.  Returns
    None if the full profile length does not suffice.
    """
    tasks = tuple(tasks)
    if not tasks:
        raise ValueError("no tasks given")
    full = len(tasks[0].profile)
    for m in range(1, full + 1):
        system = TaskSystem(tuple(t.with_processors(m) for t in tasks), m)
        try:
            if check_feasibility(system).feasible:
                return m
        except InherentlyInfeasibleError:
            continue
    return None


@dataclass(frozen=True)
class EdfUsResult:
    """Outcome of the EDF-US[1/2] test on a reduced system.

    The test is sufficient only: ``passes == False`` is not evidence of
    infeasibility.

    ``required_processors`` is ``ceil(2 * U' - 1)`` exactly as the formula
    gives it (0 for an empty residual set).  When the residual set is not
    empty but the formula yields 0 (``U' <= 1/2``) the bound is degenerate;
    ``degenerate`` is set and ``effective_processors`` reports at least 1.
    """
    passes: bool
    bound: Fraction
    required_processors: int
    extra_over_reduction: int
    degenerate: bool
    effective_processors: int
    sufficient_only: bool = True


def edf_us_half_test(reduced, available: int) -> EdfUsResult:
    """EDF-US[1/2] sufficient test ``2 * sum(u') - 1 <= available``."""
    utils = [r.utilization for r in reduced.residual_tasks]
    if not utils:
        return EdfUsResult(True, Fraction(0), 0, -reduced.residual_processors,
                           False, 0)
    total = sum(utils, Fraction(0))
    bound = 2 * total - 1
    required = ceil(bound)
    degenerate = required < 1
    return EdfUsResult(
        passes=bound <= available,
        bound=bound,
        required_processors=required,
        extra_over_reduction=required - reduced.residual_processors,
        degenerate=degenerate,
        effective_processors=max(required, 1),
    )
