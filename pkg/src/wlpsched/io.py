"""Task-set documents (JSON) and exact rational rendering.

Document grammar::

    {
      "processors": <positive integer>,
      "tasks": [
        {"name": <string>, "C": <positive integer>, "T": <positive integer>,
         "gamma": [<decimal string>, ...]},   # exactly `processors` entries
        ...
      ]
    }

``gamma`` entries are decimal strings such as ``"1.25"``; ``"p/q"`` is
accepted for values without a finite decimal expansion.  JSON numbers are
refused for ``gamma`` so that no value ever passes through a float.
"""

import json
from fractions import Fraction
from typing import Any, Dict

from .model import (InvalidInputError, ParallelismProfile, Task, TaskSystem,
                    fmt_rat, to_rat, validate_profile)


class TaskSetError(ValueError):
    """Problem in a task-set document, with its location."""


def decimal_str(q: Fraction) -> str:
    """Exact decimal text when the expansion terminates, else ``p/q``.

    >>> decimal_str(Fraction(3, 2)), decimal_str(Fraction(1, 3))
    ('1.5', '1/3')
    """
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return fmt_rat(q)
    places = max(twos, fives, 1)
    scaled = q * 10 ** places
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled.numerator)).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def _int_field(obj, key, where):
    if key not in obj:
        raise TaskSetError(f"{where}: missing field '{key}'")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise TaskSetError(f"{where}.{key}: expected a positive integer, got {v!r}")
    return v


def taskset_from_dict(doc: Dict[str, Any]) -> TaskSystem:
    if not isinstance(doc, dict):
        raise TaskSetError("top level: expected an object")
    m = _int_field(doc, "processors", "top level")
    raw = doc.get("tasks")
    if not isinstance(raw, list) or not raw:
        raise TaskSetError("top level.tasks: expected a non-empty array")
    tasks = []
    for n, item in enumerate(raw):
        where = f"tasks[{n}]"
        if not isinstance(item, dict):
            raise TaskSetError(f"{where}: expected an object")
        name = item.get("name", f"t{n + 1}")
        if not isinstance(name, str):
            raise TaskSetError(f"{where}.name: expected a string")
        C = _int_field(item, "C", where)
        T = _int_field(item, "T", where)
        gam = item.get("gamma")
        if not isinstance(gam, list):
            raise TaskSetError(f"{where}.gamma: expected an array of decimal strings")
        if len(gam) != m:
            raise TaskSetError(f"{where}.gamma: has {len(gam)} entries but processors is {m}")
        values = []
        for j, g in enumerate(gam):
            if not isinstance(g, str):
                raise TaskSetError(f"{where}.gamma[{j}]: expected a decimal string, got {g!r}")
            try:
                values.append(to_rat(g))
            except InvalidInputError as exc:
                raise TaskSetError(f"{where}.gamma[{j}]: {exc}") from None
        try:
            report = validate_profile(values)
        except InvalidInputError as exc:
            raise TaskSetError(f"{where}.gamma: {exc}") from None
        if not report.ok:
            raise TaskSetError(f"{where}.gamma: " + "; ".join(str(v) for v in report.violations))
        tasks.append(Task(name, C, T, ParallelismProfile(values, validate=False)))
    return TaskSystem(tuple(tasks), m)


def parse_taskset_text(text: str) -> TaskSystem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TaskSetError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return taskset_from_dict(doc)


def parse_taskset(path) -> TaskSystem:
    """Read and validate a task-set file.

    Raises:
        TaskSetError: syntax error (with line and column), a bad field, a
            profile of the wrong length or a work-limited violation.
        OSError: the file cannot be read.
    """
    with open(path, encoding="utf-8") as fh:
        return parse_taskset_text(fh.read())


def taskset_to_dict(system: TaskSystem) -> Dict[str, Any]:
    return {
        "processors": system.processors,
        "tasks": [{"name": t.name, "C": t.wcet, "T": t.period,
                   "gamma": [decimal_str(g) for g in t.profile.gammas]}
                  for t in system.tasks],
    }


def dump_taskset(system: TaskSystem) -> str:
    return json.dumps(taskset_to_dict(system), indent=2)

