"""
Cross-checking against brute force
==================================

Two small exhaustive searches confirm the closed forms: the least processor
use a task can get away with, and whether any slot-by-slot schedule exists.
"""

from wlpsched import Task, TaskSystem, check_feasibility, compute_lambda
from wlpsched.oracle import brute_force_min_use, exhaustive_feasible

t1 = Task("t1", 6, 4, ["1.0", "1.5", "2.0"])
t2 = Task("t2", 3, 4, ["1.0", "1.2", "1.3"])

# %%
for t in (t1, t2):
    print(t.name, "lambda", compute_lambda(t), "grid search", brute_force_min_use(t, 100))

# %%
for tasks in ((t1, t2), (t1, t1)):
    s = TaskSystem(tasks, 3)
    print([t.name for t in tasks], "formula:", check_feasibility(s).feasible,
          "search:", exhaustive_feasible(s, 4))
