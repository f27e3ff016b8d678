"""Named pass/fail results shared by the verifiers and the CLI."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Check:
    """One verified statement.

    ``binding`` checks are consequences that must hold (a failure is a bug
    or a genuine counterexample); non-binding ones are reported outcomes,
    e.g. conclusions whose hypotheses are not met at this scale.
    """

    name: str
    holds: bool
    binding: bool = True
    details: dict[str, Any] = field(default_factory=dict)


@dataclass
class Verification:
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, holds: bool, binding: bool = True, **details) -> Check:
        c = Check(name, bool(holds), binding, details)
        self.checks.append(c)
        return c

    @property
    def violations(self) -> list[Check]:
        return [c for c in self.checks if c.binding and not c.holds]

    @property
    def ok(self) -> bool:
        return not self.violations

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)
