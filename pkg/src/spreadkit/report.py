"""Report objects and their canonical JSON form.

Canonical means: keys sorted, two-space indentation, ASCII only, reals
rounded to 12 significant digits, exact rationals written as ``"a/b"``
strings and infinities as ``"inf"``. Two runs that compute the same values
therefore produce the same bytes.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Optional

from . import __version__
from .checks import Check, Verification

PASS = "pass"
FAIL = "fail"


def canonical_value(x: Any) -> Any:
    """Recursively turn ``x`` into JSON-ready data with fixed formatting."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.12g}")
    if isinstance(x, dict):
        return {str(k): canonical_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [canonical_value(v) for v in x]
    if hasattr(x, "item"):  # numpy scalars
        return canonical_value(x.item())
    raise TypeError(f"cannot serialise {type(x).__name__}")


def dumps(data: Any) -> str:
    return json.dumps(canonical_value(data), sort_keys=True, indent=2,
                      ensure_ascii=True, allow_nan=False) + "\n"


def digest(chunks: Iterable[bytes]) -> str:
    h = hashlib.sha256()
    for c in chunks:
        h.update(hashlib.sha256(c).digest())
    return h.hexdigest()


def violation(check: Check, where: Optional[str] = None) -> dict:
    details = dict(check.details)
    witness = details.pop("witness", None)
    if where is not None:
        details["instance"] = where
    return {"check": check.name, "witness": witness, "details": details}


@dataclass
class Report:
    command: str
    input_digest: str
    params: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    seed: Optional[int] = None
    runtime_ms: int = 0
    status: str = PASS
    version: str = __version__

    def absorb(self, v: Verification, where: Optional[str] = None) -> None:
        """Append the binding failures of ``v`` and downgrade the status."""
        for c in v.violations:
            self.violations.append(violation(c, where))
        if self.violations:
            self.status = FAIL

    def to_dict(self) -> dict:
        return {
            "command": self.command, "version": self.version,
            "input_digest": self.input_digest, "params": self.params,
            "results": self.results, "violations": self.violations,
            "seed": self.seed, "runtime_ms": self.runtime_ms, "status": self.status,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def to_table(self) -> str:
        lines = [f"{self.command}  status={self.status}"]
        for key in sorted(self.params):
            lines.append(f"  param {key}: {_short(self.params[key])}")
        for key in sorted(self.results):
            lines.append(f"  {key}: {_short(self.results[key])}")
        for v in self.violations:
            lines.append(f"  VIOLATION {v['check']}: {_short(v['details'])}")
        return "\n".join(lines) + "\n"


def _short(x: Any, limit: int = 100) -> str:
    text = json.dumps(canonical_value(x), sort_keys=True)
    return text if len(text) <= limit else text[: limit - 3] + "..."
