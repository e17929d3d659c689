from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any


@dataclass
class Check:
    name: str
    value: Any
    tol: float | None = None
    passed: bool = True
    tag: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        val = f"{self.value:.3e}" if isinstance(self.value, float) else str(self.value)
        tol = f" (tol {self.tol:.1e})" if self.tol is not None else ""
        tag = f" [{self.tag}]" if self.tag else ""
        return f"{status}  {self.name}: {val}{tol}{tag}"


@dataclass
class VerificationReport:
    """Outcome of a batch of numerical checks; passes iff every check passes."""

    subject: str
    checks: list[Check] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def residual(self, name, value, tol, tag=""):
        value = float(value)
        self.checks.append(Check(name, value, tol, bool(value < tol), tag))
        return self

    def flag(self, name, ok, tag="", value=None):
        self.checks.append(Check(name, ok if value is None else value, None, bool(ok), tag))
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_residual(self) -> float:
        vals = [c.value for c in self.checks if isinstance(c.value, float)]
        return max(vals) if vals else 0.0

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def text(self) -> str:
        head = f"{self.subject}: {'PASS' if self.passed else 'FAIL'}"
        return "\n".join([head] + ["  " + c.line() for c in self.checks])

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "value": c.value if not isinstance(c.value, bool) else c.value,
                 "tol": c.tol, "passed": c.passed, "tag": c.tag}
                for c in self.checks
            ],
        }

    def json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str)
