"""
Reduction to sequential residual tasks
======================================

Each task keeps k processors for itself, so it never migrates off them.
What is left is a set of ordinary sequential tasks on the remaining
processors, which global EDF-US[1/2] can schedule given enough room.
"""

from wlpsched import (ArrivalModel, Task, TaskSystem, build_reduced_schedule_plan,
                      edf_us_half_test, generate_arrivals, simulate_global_edf)

system = TaskSystem((Task("t1", 6, 4, ["1.0", "1.5", "2.0"]),
                     Task("t2", 3, 4, ["1.0", "1.2", "1.3"])), 3)
plan = build_reduced_schedule_plan(system)
red = plan.reduced

print("static processors:", red.static_assignment)
for r in red.residual_tasks:
    print(f"residual {r.name}: C'={r.wcet} T={r.period} u'={r.utilization}")
print("residual processors:", red.residual_processors)

# %%
# The EDF-US[1/2] test is sufficient only.  Here it asks for one processor
# more than the reduction leaves free.
us = edf_us_half_test(red, red.residual_processors)
print(f"2*sum(u') - 1 = {us.bound}; needs {us.required_processors}, extra {us.extra_over_reduction}")

# %%
# With that extra processor the residual tasks run without a miss, and the
# preemption and migration counts stay below the number of jobs.
H = 10 * system.hyperperiod()
arrivals = generate_arrivals(red.residual_tasks, ArrivalModel(), H)
rep = simulate_global_edf(red.residual_tasks, us.required_processors, "us-half", arrivals, H)
print(f"misses {len(rep.deadline_misses)}, preemptions {rep.preemptions}, "
      f"migrations {rep.migrations}, jobs {rep.jobs_released}")
