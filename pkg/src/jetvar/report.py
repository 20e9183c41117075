"""Pass/fail records shared by the identity suites and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)
    values: dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> Check:
        c = Check(name, bool(passed), detail)
        self.checks.append(c)
        return c

    def extend(self, other: "Report") -> None:
        self.checks.extend(other.checks)
        self.values.update(other.values)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


class Tally:
    """Accumulates sampled comparisons under one check name, keeping the
    first counterexample."""

    def __init__(self, name: str) -> None:
        self.name = name
        self.count = 0
        self.counterexample = ""

    def record(self, ok: bool, describe) -> None:
        self.count += 1
        if not ok and not self.counterexample:
            self.counterexample = describe() if callable(describe) else str(describe)

    def into(self, report: Report) -> Check:
        passed = not self.counterexample and self.count > 0
        detail = self.counterexample or f"{self.count} comparisons"
        return report.add(self.name, passed, detail)
