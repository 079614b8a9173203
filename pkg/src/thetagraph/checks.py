from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Check:
    """Outcome of one named verification step."""

    name: str
    passed: bool
    residual: float | None = None
    expected: Any = None
    observed: Any = None
    backend: str | None = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "backend": self.backend,
        }
        if self.residual is not None:
            out["residual"] = self.residual
        if self.expected is not None:
            out["expected"] = self.expected
        if self.observed is not None:
            out["observed"] = self.observed
        if self.detail:
            out["detail"] = self.detail
        return out


def all_passed(checks) -> bool:
    return all(c.passed for c in checks)
