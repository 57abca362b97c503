"""Reduction to a sequential residual problem.

Every task keeps ``k_i`` processors permanently (so it never migrates off
them) and asks for one extra processor for ``ell_i * T_i`` time units per
job.  The extra demands form an ordinary sequential sporadic task set
``tau'`` on the ``m' = m - sum(k_i)`` remaining processors.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Tuple

from .feasibility import FeasibilityVerdict, check_feasibility
from .model import TaskSystem


class InfeasibleSystemError(ValueError):
    def __init__(self, verdict: FeasibilityVerdict):
        self.verdict = verdict
        super().__init__(f"system is infeasible: load {verdict.load} > {verdict.capacity} processors")


@dataclass(frozen=True)
class ResidualTask:
    """Sequential sporadic task with rational demand ``wcet`` (``C'_i``).

    ``index`` is the 1-based index of the originating task.
    """
    name: str
    index: int
    wcet: Fraction
    period: int

    @property
    def utilization(self) -> Fraction:
        return Fraction(self.wcet) / self.period


@dataclass(frozen=True)
class ReducedSystem:
    residual_tasks: Tuple[ResidualTask, ...]
    static_assignment: Dict[int, int]
    residual_processors: int

    @property
    def residual_processor_ids(self) -> List[int]:
        first = len(self.static_assignment) + 1
        return list(range(first, first + self.residual_processors))


@dataclass(frozen=True)
class TaskPlan:
    task: int
    static_processors: FrozenSet[int]
    extra_duration: Fraction


@dataclass(frozen=True)
class ReducedPlan:
    reduced: ReducedSystem
    tasks: Tuple[TaskPlan, ...]
    verdict: FeasibilityVerdict

    def for_task(self, index: int) -> TaskPlan:
        return self.tasks[index - 1]


def reduce(system: TaskSystem) -> ReducedSystem:
    return build_reduced_schedule_plan(system).reduced


def build_reduced_schedule_plan(system: TaskSystem) -> ReducedPlan:
    """Static processors and per-job extra-processor durations for each task.

    Static processors are handed out from ``p_1`` upward in task order.

    Raises:
        InfeasibleSystemError: the system fails the exact feasibility test.
    """
    verdict = check_feasibility(system)
    if not verdict.feasible:
        raise InfeasibleSystemError(verdict)

    static: Dict[int, int] = {}
    plans, residual = [], []
    next_proc = 1
    for i, (task, p) in enumerate(zip(system.tasks, verdict.per_task), start=1):
        procs = frozenset(range(next_proc, next_proc + p.k))
        for q in procs:
            static[q] = i
        next_proc += p.k
        extra = p.ell * task.period
        plans.append(TaskPlan(i, procs, extra))
        if p.ell > 0:
            residual.append(ResidualTask(task.name, i, extra, task.period))

    reduced = ReducedSystem(tuple(residual), static, system.processors - len(static))
    return ReducedPlan(reduced, tuple(plans), verdict)
