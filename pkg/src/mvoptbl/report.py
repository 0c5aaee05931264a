"""Check records and run reports with JSON and text rendering."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

SCHEMA_VERSION = 1


@dataclass
class Check:
    """One numeric check: ``value < tolerance`` (or ``>`` when ``above``)."""

    name: str
    identity: str
    value: float
    tolerance: float
    above: bool = False

    @property
    def passed(self) -> bool:
        if math.isnan(self.value):
            return False
        return self.value > self.tolerance if self.above else self.value < self.tolerance

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "identity": self.identity,
            "max_residual": _num(self.value),
            "tolerance": self.tolerance,
            "relation": ">" if self.above else "<",
            "pass": self.passed,
        }


def _num(v):
    v = float(v)
    return v if math.isfinite(v) else str(v)


@dataclass
class Report:
    command: str
    config: dict
    checks: list = field(default_factory=list)
    sections: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    version: str = ""

    def add(self, *checks: Check):
        self.checks.extend(checks)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self, timestamp: str | None = None) -> dict:
        # everything that varies from run to run lives under "timestamp"
        return {
            "schema": SCHEMA_VERSION,
            "version": self.version,
            "command": self.command,
            "config": self.config,
            "pass": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "notes": self.notes,
            **self.sections,
            "timestamp": {"utc": timestamp, **self.timing},
        }

    def to_json(self, timestamp: str | None = None) -> str:
        return json.dumps(self.to_dict(timestamp), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        width = max([len(c.name) for c in self.checks] + [10])
        lines = [f"{self.command}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            rel = ">" if c.above else "<"
            lines.append(f"  {c.name:<{width}}  {c.value:.2e} {rel} {c.tolerance:.1e}"
                         f"  {'PASS' if c.passed else 'FAIL'}")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines) + "\n"


def strip_timestamp(doc: dict) -> dict:
    """Copy of a report document without its run-dependent field."""
    return {k: v for k, v in doc.items() if k != "timestamp"}
