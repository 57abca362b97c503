"""
Parallelism profiles and the exact feasibility test
===================================================

A job of a task may run on several processors at once, but never gains
more than linearly from it.  This script validates a few profiles and then
decides feasibility of a two-task system exactly.
"""

from fractions import Fraction

from wlpsched import (Task, TaskSystem, check_feasibility, derive, min_processors,
                      validate_profile)

# %%
# A profile lists the work rate on 1, 2, ... processors.  The last entry
# here jumps too far: 4.9 is more than 5/4 of 1.3.
for gammas in (["1.0", "1.5", "2.0"], ["1.0", "1.1", "1.2", "1.3", "4.9"], ["1.0", "2.0"]):
    report = validate_profile(gammas)
    print(gammas, "ok" if report.ok else [str(v) for v in report.violations])

# %%
# Each task needs k full processors plus one more for a fraction ell of the
# time; lambda = k + ell is its processor use per time unit.
t1 = Task("t1", 6, 4, ["1.0", "1.5", "2.0"])
t2 = Task("t2", 3, 4, ["1.0", "1.2", "1.3"])
for t in (t1, t2):
    d = derive(t)
    print(f"{t.name}: u={d.utilization} k={d.k} ell={d.ell} lambda={d.lam}")

# %%
# The system is feasible exactly when the lambdas fit on m processors.
verdict = check_feasibility(TaskSystem((t1, t2), 3))
print("load", verdict.load, "on", verdict.capacity, "->", "feasible" if verdict.feasible else "infeasible")
print("two copies of t1:", check_feasibility(TaskSystem((t1, t1), 3)).feasible)

# %%
# The smallest platform that works, trying profile prefixes.
print("fewest processors:", min_processors([t1, t2]))
assert verdict.load == Fraction(11, 4)
