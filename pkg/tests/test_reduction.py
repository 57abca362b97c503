import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from gen import feasible_system
from wlpsched.feasibility import check_feasibility
from wlpsched.model import Task, TaskSystem
from wlpsched.reduction import InfeasibleSystemError, build_reduced_schedule_plan, reduce

TAU1 = Task("t1", 6, 4, ("1.0", "1.5", "2.0"))
TAU2 = Task("t2", 3, 4, ("1.0", "1.2", "1.3"))
EXAMPLE = TaskSystem((TAU1, TAU2), 3)


def test_example_reduction():
    red = reduce(EXAMPLE)
    assert red.static_assignment == {1: 1}
    assert [(r.index, r.wcet, r.period) for r in red.residual_tasks] == [(1, 4, 4), (2, 3, 4)]
    assert red.residual_processors == 2
    assert red.residual_processor_ids == [2, 3]
    assert red.residual_tasks[0].utilization == 1


def test_example_plan():
    plan = build_reduced_schedule_plan(EXAMPLE)
    assert plan.for_task(1).static_processors == {1} and plan.for_task(1).extra_duration == 4
    assert plan.for_task(2).static_processors == frozenset() and plan.for_task(2).extra_duration == 3


def test_all_light_tasks_keep_everything_residual():
    s = TaskSystem((Task("a", 1, 2, ["1", "1.5"]), Task("b", 3, 4, ["1", "1.5"])), 2)
    red = reduce(s)
    assert red.static_assignment == {} and red.residual_processors == 2
    assert [r.wcet for r in red.residual_tasks] == [1, 3]


def test_rational_residual_demand_kept_exact():
    # u = 5/3 on (1, 1.8): k = 1, ell = (2/3) / (4/5) = 5/6, so C' = 5/6 * 3
    s = TaskSystem((Task("x", 5, 3, ["1", "1.8"]),), 2)
    (r,) = reduce(s).residual_tasks
    assert r.wcet == F(5, 2) and r.utilization == F(5, 6)


def test_infeasible_input():
    with pytest.raises(InfeasibleSystemError) as exc:
        reduce(TaskSystem((TAU1, TAU1), 3))
    assert exc.value.verdict.load == 4


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_invariants(seed):
    s = feasible_system(random.Random(seed))
    v = check_feasibility(s)
    plan = build_reduced_schedule_plan(s)
    red = plan.reduced
    ks = [p.k for p in v.per_task]
    # same processor budget, spent differently
    assert sum(r.utilization for r in red.residual_tasks) + sum(ks) == v.load
    assert red.residual_processors == s.processors - sum(ks)
    assert all(0 < r.utilization <= 1 for r in red.residual_tasks)
    assert sum(r.utilization for r in red.residual_tasks) <= red.residual_processors
    # static processors: contiguous from p_1, k_i of them per task, in task order
    assert sorted(red.static_assignment) == list(range(1, sum(ks) + 1))
    owners = [red.static_assignment[p] for p in sorted(red.static_assignment)]
    assert owners == sorted(owners)
    for i, k in enumerate(ks, 1):
        assert owners.count(i) == k == len(plan.for_task(i).static_processors)
        assert plan.for_task(i).extra_duration > 0
