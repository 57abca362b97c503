"""Task model for sporadic implicit-deadline tasks with work-limited job parallelism.

A task ``(C, T, gammas)`` running on ``j`` processors simultaneously completes
``gammas[j-1]`` units of work per time unit.  All real-valued quantities are
kept as :class:`fractions.Fraction`; no floating point is used in any
analysis path.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from numbers import Rational
from typing import List, Sequence, Tuple, Union

Rat = Fraction
RatLike = Union[int, str, Fraction, float]


class InvalidInputError(ValueError):
    """Malformed input (empty profile, non-positive value, bad types...)."""


class ProfileError(ValueError):
    """A parallelism profile violates the work-limited constraints."""

    def __init__(self, violations, where=""):
        self.violations = list(violations)
        msg = "; ".join(str(v) for v in self.violations)
        super().__init__(f"{where}{msg}" if where else msg)


class InherentlyInfeasibleError(ValueError):
    """One or more tasks need more work per time unit than ``m`` processors give."""

    def __init__(self, tasks):
        self.tasks = list(tasks)
        names = ", ".join(f"{t.name} (u={t.utilization} > gamma_m={t.profile[-1]})"
                          for t in self.tasks)
        super().__init__(f"inherently infeasible task(s): {names}")


def to_rat(value: RatLike) -> Fraction:
    """Convert ``value`` to an exact rational.

    Decimal strings are parsed exactly (``"1.1"`` is 11/10).  Floats are
    converted through their shortest decimal representation, so ``1.1``
    also becomes 11/10 rather than the binary approximation.

    >>> to_rat("1.5")
    Fraction(3, 2)
    >>> to_rat(1.1)
    Fraction(11, 10)
    """
    if isinstance(value, bool):
        raise InvalidInputError(f"not a number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInputError(f"not an exact decimal or fraction: {value!r}") from exc
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    raise InvalidInputError(f"not a number: {value!r}")


def fmt_rat(q: Fraction) -> str:
    """Render as ``p/q`` (or ``p`` for integers)."""
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Violation:
    """One broken work-limited constraint.

    ``indices`` are 1-based processor counts: ``(j, j+1)`` for the
    increasing and ratio constraints, ``(j, j+1, j+2)`` for concavity.
    """
    constraint: str  # "increasing" | "ratio" | "concave"
    indices: Tuple[int, ...]
    detail: str = ""

    def __str__(self):
        return f"{self.constraint} violated at {self.indices}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_profile(profile) -> ValidationReport:
    """Check the work-limited constraints on a rate profile.

    Only adjacent pairs are checked; the pairwise forms follow from them.

    Raises:
        InvalidInputError: empty profile or a non-positive entry.  These are
            input errors, distinct from constraint violations.
    """
    gammas = [to_rat(g) for g in (profile.gammas if isinstance(profile, ParallelismProfile)
                                  else profile)]
    if not gammas:
        raise InvalidInputError("empty parallelism profile")
    for j, g in enumerate(gammas, start=1):
        if g <= 0:
            raise InvalidInputError(f"gamma_{j} = {fmt_rat(g)} is not positive")

    found = []
    m = len(gammas)
    for j in range(1, m):
        lo, hi = gammas[j - 1], gammas[j]
        if not lo < hi:
            found.append(Violation("increasing", (j, j + 1),
                                   f"gamma_{j + 1}={fmt_rat(hi)} <= gamma_{j}={fmt_rat(lo)}"))
        if not hi / lo < Fraction(j + 1, j):
            found.append(Violation("ratio", (j, j + 1),
                                   f"gamma_{j + 1}/gamma_{j} = {fmt_rat(hi / lo)} "
                                   f">= {j + 1}/{j}; gamma_{j + 1} must be < "
                                   f"{fmt_rat(lo * Fraction(j + 1, j))}"))
    for j in range(1, m - 1):
        d1 = gammas[j] - gammas[j - 1]
        d2 = gammas[j + 1] - gammas[j]
        if d2 > d1:
            found.append(Violation("concave", (j, j + 1, j + 2),
                                   f"increment {fmt_rat(d2)} > previous increment {fmt_rat(d1)}"))
    return ValidationReport(tuple(found))


@dataclass(frozen=True)
class ParallelismProfile:
    """Execution-rate factors ``(gamma_1, ..., gamma_m)``.

    ``gamma_0 = 0`` is implied and never stored.  Construction validates the
    work-limited constraints and raises :class:`ProfileError` on violation.
    """
    gammas: Tuple[Fraction, ...]

    def __init__(self, gammas: Sequence[RatLike], validate: bool = True):
        vals = tuple(to_rat(g) for g in gammas)
        object.__setattr__(self, "gammas", vals)
        if validate:
            report = validate_profile(vals)
            if not report.ok:
                raise ProfileError(report.violations)

    def __len__(self):
        return len(self.gammas)

    def __iter__(self):
        return iter(self.gammas)

    def __getitem__(self, idx):
        return self.gammas[idx]

    def rate(self, j: int) -> Fraction:
        """Work per time unit on ``j`` processors; ``rate(0) == 0``."""
        return self.gammas[j - 1] if j > 0 else Fraction(0)

    def prefix(self, m: int) -> "ParallelismProfile":
        # prefixes of a valid profile are valid
        return ParallelismProfile(self.gammas[:m], validate=False)

    def __repr__(self):
        return f"ParallelismProfile(({', '.join(fmt_rat(g) for g in self.gammas)}))"


@dataclass(frozen=True)
class Task:
    """Sporadic task with integer WCET ``wcet`` and period ``period`` (= deadline)."""
    name: str
    wcet: int
    period: int
    profile: ParallelismProfile

    def __post_init__(self):
        for attr in ("wcet", "period"):
            v = getattr(self, attr)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise InvalidInputError(f"task {self.name}: {attr} must be a positive integer, got {v!r}")
        if not isinstance(self.profile, ParallelismProfile):
            object.__setattr__(self, "profile", ParallelismProfile(self.profile))

    @property
    def utilization(self) -> Fraction:
        return Fraction(self.wcet, self.period)

    def with_processors(self, m: int) -> "Task":
        return Task(self.name, self.wcet, self.period, self.profile.prefix(m))


@dataclass(frozen=True)
class TaskSystem:
    """Tasks ``tau_1 .. tau_n`` (1-based indices) on ``processors`` identical processors."""
    tasks: Tuple[Task, ...]
    processors: int

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        m = self.processors
        if isinstance(m, bool) or not isinstance(m, int) or m < 1:
            raise InvalidInputError(f"processors must be a positive integer, got {m!r}")
        if not self.tasks:
            raise InvalidInputError("a task system needs at least one task")
        for t in self.tasks:
            if len(t.profile) != m:
                raise InvalidInputError(
                    f"task {t.name}: profile has {len(t.profile)} entries, expected {m}")

    @property
    def n(self) -> int:
        return len(self.tasks)

    def task(self, index: int) -> Task:
        """1-based lookup."""
        if not 1 <= index <= len(self.tasks):
            raise IndexError(f"no task with index {index}")
        return self.tasks[index - 1]

    def hyperperiod(self) -> int:
        return lcm(*(t.period for t in self.tasks))

    def with_processors(self, m: int) -> "TaskSystem":
        return TaskSystem(tuple(t.with_processors(m) for t in self.tasks), m)


@dataclass(frozen=True)
class DerivedParams:
    """Per-task analysis quantities: utilization, ``k``, ``ell`` and ``lam = k + ell``."""
    utilization: Fraction
    k: int
    ell: Fraction

    @property
    def lam(self) -> Fraction:
        return self.k + self.ell


def utilization(task: Task) -> Fraction:
    return Fraction(task.wcet, task.period)


def _k_ell(task: Task) -> Tuple[int, int, int]:
    """``(k, ell_num, ell_den)`` in pure integer arithmetic.

    Used on the hot path of schedule construction, where Fraction
    arithmetic dominates the run time.
    """
    C, T = task.wcet, task.period
    gammas = task.profile.gammas
    k = 0
    # gammas strictly increase, so k is the count of entries below u = C/T
    for g in gammas:
        if g.numerator * T < C * g.denominator:
            k += 1
        else:
            break
    if k == len(gammas):
        raise InherentlyInfeasibleError([task])
    hi = gammas[k]
    if k == 0:
        # ell = (C/T) / hi
        num, den = C * hi.denominator, T * hi.numerator
    else:
        lo = gammas[k - 1]
        # (C/T - a/b) / (c/d - a/b) = d (C b - a T) / (T (c b - a d))
        a, b, c, d = lo.numerator, lo.denominator, hi.numerator, hi.denominator
        num, den = d * (C * b - a * T), T * (c * b - a * d)
    g = gcd(num, den)
    return k, num // g, den // g


def compute_k(task: Task) -> int:
    """Largest ``k`` with ``gamma_k < u`` (0 when ``u <= gamma_1``).

    Raises:
        InherentlyInfeasibleError: ``u > gamma_m``, no processor count suffices.
    """
    return _k_ell(task)[0]


def compute_ell(task: Task) -> Fraction:
    """Fraction of each interval the task spends on ``k + 1`` processors.

    Solves ``ell * gamma_{k+1} + (1 - ell) * gamma_k = u``.
    """
    _, num, den = _k_ell(task)
    return Fraction(num, den)


def compute_lambda(task: Task) -> Fraction:
    """Total processor use per time unit, ``k + ell``."""
    k, num, den = _k_ell(task)
    return Fraction(k * den + num, den)


def derive(task: Task) -> DerivedParams:
    k, num, den = _k_ell(task)
    return DerivedParams(Fraction(task.wcet, task.period), k, Fraction(num, den))


def inherently_infeasible(system: TaskSystem) -> List[Task]:
    return [t for t in system.tasks if t.utilization > t.profile.gammas[-1]]


def derive_all(system: TaskSystem) -> List[DerivedParams]:
    """Derived parameters for every task, failing early on impossible tasks."""
    bad = inherently_infeasible(system)
    if bad:
        raise InherentlyInfeasibleError(bad)
    return [derive(t) for t in system.tasks]
