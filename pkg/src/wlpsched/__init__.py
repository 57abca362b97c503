"""Analysis and simulation of sporadic implicit-deadline tasks whose jobs may
run on several processors at once under work-limited parallelism."""

from .canonical import (IDLE, CanonicalReport, Infeasible, MalformedPatternError, SchedulePattern,
                        Segment, build_canonical, verify_canonical, work_delivered)
from .feasibility import (EdfUsResult, FeasibilityVerdict, check_feasibility, edf_us_half_test,
                          min_processors)
from .io import TaskSetError, dump_taskset, parse_taskset, parse_taskset_text, taskset_to_dict
from .model import (DerivedParams, InherentlyInfeasibleError, InvalidInputError, ParallelismProfile,
                    ProfileError, Task, TaskSystem, ValidationReport, Violation, compute_ell,
                    compute_k, compute_lambda, derive, derive_all, inherently_infeasible,
                    validate_profile)
from .reduction import (InfeasibleSystemError, ReducedPlan, ReducedSystem, ResidualTask,
                        build_reduced_schedule_plan, reduce)
from .render import gantt_svg, gantt_text
from .sim import (ArrivalModel, DeadlineMiss, SimReport, TraceEvent, default_horizon,
                  generate_arrivals, simulate_global_edf, simulate_pattern, simulate_reduced,
                  write_trace_csv)

__version__ = "0.1.0"
