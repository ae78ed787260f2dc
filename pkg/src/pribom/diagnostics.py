"""Soft-failure channel used by every pipeline stage.

Parsers and analyzers keep going on recoverable oddities (unresolved
widget ids, unknown library names, skipped elements) and record them
here instead of raising. The CLI writes the collected entries to a
sidecar report next to the generated document.
"""

from __future__ import annotations

import json
from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    module: str
    severity: str  # "info" | "warning" | "error"
    message: str

    def as_dict(self) -> dict:
        return {"module": self.module, "severity": self.severity, "message": self.message}


class Diagnostics:
    """Ordered, append-only collection of Diagnostic entries."""

    def __init__(self) -> None:
        self.entries: list[Diagnostic] = []

    def add(self, module: str, severity: str, message: str) -> None:
        self.entries.append(Diagnostic(module, severity, message))

    def info(self, module: str, message: str) -> None:
        self.add(module, "info", message)

    def warning(self, module: str, message: str) -> None:
        self.add(module, "warning", message)

    def count(self, module: str | None = None) -> int:
        if module is None:
            return len(self.entries)
        return sum(1 for e in self.entries if e.module == module)

    def messages(self) -> list[str]:
        return [e.message for e in self.entries]

    def to_json(self) -> str:
        return json.dumps([e.as_dict() for e in self.entries], indent=2, sort_keys=True) + "\n"
