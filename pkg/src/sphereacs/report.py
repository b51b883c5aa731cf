"""Audit reports: named checks pairing computed values against claimed values.

A check is *asserted* when its failure should fail the run (CLI exit code 1),
and *recorded* when a mismatch is a legitimate measured outcome that must be
kept in the report without failing anything.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    name: str
    computed: float
    expected: float
    tolerance: float
    claim: str
    asserted: bool = True

    @property
    def error(self) -> float:
        return abs(self.computed - self.expected)

    @property
    def passed(self) -> bool:
        return self.error <= self.tolerance

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "mismatch"


@dataclass
class AuditReport:
    title: str
    checks: list[Check] = field(default_factory=list)

    def add(
        self,
        name: str,
        computed: float,
        expected: float,
        tolerance: float,
        claim: str,
        asserted: bool = True,
    ) -> Check:
        check = Check(name, float(computed), float(expected), float(tolerance), claim, asserted)
        self.checks.append(check)
        return check

    def extend(self, other: "AuditReport") -> None:
        self.checks.extend(other.checks)

    @property
    def passed(self) -> bool:
        """True when every asserted check passes."""
        return all(c.passed for c in self.checks if c.asserted)

    def failures(self) -> list[Check]:
        """Asserted checks that missed their tolerance."""
        return [c for c in self.checks if c.asserted and not c.passed]

    def mismatches(self) -> list[Check]:
        """Recorded-only checks that missed their tolerance."""
        return [c for c in self.checks if not c.asserted and not c.passed]

    def counts(self) -> tuple[int, int, int]:
        """(passes, recorded mismatches, asserted failures); sums to len(checks)."""
        passes = sum(1 for c in self.checks if c.passed)
        return passes, len(self.mismatches()), len(self.failures())

    def max_error(self, prefix: str = "") -> float:
        errs = [c.error for c in self.checks if c.name.startswith(prefix)]
        return max(errs) if errs else 0.0

    def select(self, prefix: str) -> list[Check]:
        return [c for c in self.checks if c.name.startswith(prefix)]

    def rows(self) -> list[dict]:
        return [
            {
                "name": c.name,
                "computed": c.computed,
                "expected": c.expected,
                "tolerance": c.tolerance,
                "verdict": c.verdict,
                "asserted": c.asserted,
                "claim": c.claim,
            }
            for c in self.checks
        ]

    def table(self, max_rows: int | None = None) -> str:
        """Human-readable aligned table."""
        header = f"{'check':<44} {'computed':>24} {'expected':>24} {'tol':>10} verdict"
        lines = [self.title, "-" * len(header), header, "-" * len(header)]
        shown = self.checks if max_rows is None else self.checks[:max_rows]
        for c in shown:
            lines.append(
                f"{c.name:<44} {c.computed:>24.16e} {c.expected:>24.16e} "
                f"{c.tolerance:>10.1e} {c.verdict}"
            )
        if max_rows is not None and len(self.checks) > max_rows:
            lines.append(f"... ({len(self.checks) - max_rows} more rows)")
        passes, mismatches, fails = self.counts()
        lines.append("-" * len(header))
        lines.append(f"{passes} pass / {mismatches} recorded mismatch / {fails} fail")
        return "\n".join(lines)
