"""Structured check reports shared by the verification modules.

Every verification routine returns a CheckReport.  A report that fails must
carry at least one witness record explaining the first observed mismatches;
JSON serialization renders all integers (which may be huge) as decimal
strings so downstream consumers never lose precision.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"


@dataclass
class CheckReport:
    name: str
    params: dict
    status: str
    witnesses: list = field(default_factory=list)
    runtime_millis: int = 0

    def __post_init__(self):
        if self.status not in (PASS, FAIL, SKIPPED):
            raise ValueError(f"bad status {self.status!r}")
        if self.status == FAIL and not self.witnesses:
            raise ValueError("failing report must carry at least one witness")

    @property
    def ok(self) -> bool:
        return self.status != FAIL

    def to_jsonable(self) -> dict:
        return {
            "name": self.name,
            "params": _jsonable(self.params),
            "status": self.status,
            "witnesses": _jsonable(self.witnesses),
            "runtimeMillis": str(self.runtime_millis),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_jsonable(), sort_keys=True, separators=(",", ": "))

    def text_line(self) -> str:
        extra = f" ({len(self.witnesses)} witness(es))" if self.witnesses else ""
        return f"{self.name}: {self.status.upper()}{extra}"


def _jsonable(value):
    """Deterministic JSON-safe rendering: ints (arbitrary size) and Fractions
    become decimal strings, containers recurse, everything else must already
    be a JSON scalar."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        raise TypeError("reports must not contain floats")
    if isinstance(value, str):
        return value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return str(value)


class Stopwatch:
    """Millisecond wall-clock timer for report runtimes."""

    def __init__(self):
        self.start = time.monotonic()

    def millis(self) -> int:
        return int((time.monotonic() - self.start) * 1000)


def finish(name: str, params: dict, witnesses: list, watch: Stopwatch,
           skipped: bool = False) -> CheckReport:
    status = SKIPPED if skipped else (FAIL if witnesses else PASS)
    return CheckReport(name, params, status, witnesses, watch.millis())
