"""Run reports: named checks with a status and details."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from typing import Any

PASS = "PASS"
FAIL = "FAIL"
ABSENT = "ABSENT"
UNKNOWN = "UNKNOWN"
FINDING = "FINDING"
STATUSES = (PASS, FAIL, ABSENT, UNKNOWN, FINDING)


@dataclass
class Check:
    name: str
    status: str
    details: dict[str, Any] = field(default_factory=dict)
    seconds: float = 0.0

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status}")


@dataclass
class RunReport:
    command: str
    checks: list[Check] = field(default_factory=list)
    started: float = field(default_factory=time.perf_counter)

    def add(self, name: str, status: str, **details) -> Check:
        if any(c.name == name for c in self.checks):
            raise ValueError(f"duplicate check {name}")
        now = time.perf_counter()
        prev = self.checks[-1]._end if self.checks else self.started
        chk = Check(name, status, details, round(now - prev, 4))
        chk._end = now
        self.checks.append(chk)
        return chk

    def passed(self, name: str, cond: bool, **details) -> Check:
        return self.add(name, PASS if cond else FAIL, **details)

    def extend(self, other: RunReport, prefix: str = "") -> None:
        for c in other.checks:
            if any(x.name == prefix + c.name for x in self.checks):
                raise ValueError(f"duplicate check {prefix + c.name}")
            self.checks.append(Check(prefix + c.name, c.status, c.details, c.seconds))

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def ok(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "ok": self.ok,
            "elapsed": round(time.perf_counter() - self.started, 3),
            "checks": [asdict(c) for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_jsonable)

    def to_text(self) -> str:
        lines = [f"# {self.command}"]
        for c in self.checks:
            lines.append(f"[{c.status:7}] {c.name} ({c.seconds:.2f}s)")
            for k, v in c.details.items():
                lines.append(f"          {k}: {_short(v)}")
        lines.append(f"result: {'ok' if self.ok else 'FAILED'}")
        return "\n".join(lines)


def _jsonable(x):
    try:
        import numpy as np

        if isinstance(x, np.integer):
            return int(x)
        if isinstance(x, np.ndarray):
            return x.tolist()
    except ImportError:  # pragma: no cover
        pass
    if isinstance(x, (set, frozenset, tuple)):
        return list(x)
    return str(x)


def _short(v, limit: int = 300) -> str:
    s = v if isinstance(v, str) else json.dumps(v, default=_jsonable)
    return s if len(s) <= limit else s[: limit - 3] + "..."
