"""
Building and checking the canonical schedule
============================================

Tasks are laid out from the last one to the first on a short pattern that
repeats forever.  Every job then receives exactly its WCET in each window
of one period.
"""

from pathlib import Path

from wlpsched import build_canonical, gantt_svg, gantt_text, parse_taskset, verify_canonical, work_delivered

HERE = Path(__file__).parent
system = parse_taskset(HERE / "example_taskset.json")

# %%
# Pattern of length 1: four segments over three processors.
pattern = build_canonical(system)
print(gantt_text(pattern, system))
print("canonical:", verify_canonical(pattern, system).is_canonical)

# %%
# Work delivered in a window of one period, starting anywhere.
for i, task in enumerate(system.tasks, 1):
    print(task.name, [str(work_delivered(pattern, system, i, a, a + task.period)) for a in (0, 0.25, 1.6)])

# %%
# Stretching the pattern to the gcd of the periods keeps the shape but
# switches tasks far less often.
wide = build_canonical(system, "gcd")
print(gantt_text(wide, system, width=32))

out = Path("example_gantt.svg")
out.write_text(gantt_svg(wide, system))
print("wrote", out)
