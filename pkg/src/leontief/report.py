"""Pass/fail reports shared by every verifier."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass(frozen=True)
class Condition:
    """One checked inequality family.

    ``slack`` is the worst (smallest) signed slack over the family's
    components; ``slack >= 0`` means satisfied.  ``index`` points at the
    component attaining it.
    """

    name: str
    satisfied: bool
    slack: object
    index: Optional[int] = None


@dataclass(frozen=True)
class CheckReport:
    conditions: tuple = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.satisfied for c in self.conditions)

    @property
    def witness_index(self) -> Optional[int]:
        """Component index of the worst violator, or None when everything passes."""
        failing = [c for c in self.conditions if not c.satisfied]
        if not failing:
            return None
        return min(failing, key=lambda c: c.slack).index

    def condition(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed_conditions(self) -> list:
        return [c.name for c in self.conditions if not c.satisfied]

    def to_dict(self) -> dict:
        from .jsonio import encode_number

        return {
            "passed": self.passed,
            "witness_index": self.witness_index,
            "conditions": [
                {
                    "name": c.name,
                    "satisfied": c.satisfied,
                    "slack": encode_number(c.slack),
                    "index": c.index,
                }
                for c in self.conditions
            ],
        }

    def __bool__(self) -> bool:
        return self.passed


def worst(name: str, slacks, tol) -> Condition:
    """Build a Condition from per-component slacks (empty means vacuous)."""
    slacks = list(slacks)
    if not slacks:
        return Condition(name, True, 0, None)
    idx = min(range(len(slacks)), key=lambda i: slacks[i])
    s = slacks[idx]
    return Condition(name, bool(s >= -tol), s, idx)
