"""Machine-readable verification reports: deterministic, JSON round-trippable."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

SCHEMA_VERSION = 1

_STATUSES = ("pass", "fail", "skipped", "vacuous")


@dataclass
class CheckItem:
    """One verification record: a named check of a stated identity."""

    name: str
    law: str
    status: str                     # pass | fail | skipped | vacuous
    residue: Optional[str] = None   # canonical expression string on failure
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.status not in _STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def ok(self) -> bool:
        return self.status != "fail"


@dataclass
class Report:
    """An ordered sequence of checks plus the configuration that produced it."""

    title: str
    config: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    genericity_notes: list = field(default_factory=list)

    def add(self, item: CheckItem):
        self.checks.append(item)

    def extend(self, items):
        self.checks.extend(items)

    def section(self, name: str, items):
        for it in items:
            self.checks.append(CheckItem(f"{name}: {it.name}", it.law, it.status,
                                         it.residue, list(it.notes)))

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def counts(self) -> dict:
        out = {s: 0 for s in _STATUSES}
        for c in self.checks:
            out[c.status] += 1
        return out

    # -- serialization -------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "title": self.title,
            "config": self.config,
            "overall": "pass" if self.ok else "fail",
            "counts": self.counts,
            "genericity_notes": list(self.genericity_notes),
            "checks": [asdict(c) for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    @staticmethod
    def from_dict(d: dict) -> "Report":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {d.get('schema_version')!r}")
        rep = Report(d["title"], dict(d.get("config", {})),
                     genericity_notes=list(d.get("genericity_notes", [])))
        for c in d.get("checks", []):
            rep.add(CheckItem(c["name"], c["law"], c["status"],
                              c.get("residue"), list(c.get("notes", []))))
        return rep

    @staticmethod
    def from_json(text: str) -> "Report":
        return Report.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, Report):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    # -- text rendering ---------------------------------------------------------
    def to_text(self) -> str:
        lines = [f"== {self.title} =="]
        if self.config:
            lines.append("config: " + ", ".join(f"{k}={v}"
                                                for k, v in self.config.items()))
        for c in self.checks:
            mark = {"pass": "ok  ", "fail": "FAIL", "skipped": "skip",
                    "vacuous": "vac "}[c.status]
            lines.append(f"[{mark}] {c.name}  --  {c.law}")
            if c.residue:
                lines.append(f"       residue: {c.residue}")
            for n in c.notes:
                lines.append(f"       note: {n}")
        for n in self.genericity_notes:
            lines.append(f"generic: {n}")
        cnt = self.counts
        lines.append(f"summary: {cnt['pass']} pass, {cnt['fail']} fail, "
                     f"{cnt['skipped']} skipped, {cnt['vacuous']} vacuous -> "
                     + ("PASS" if self.ok else "FAIL"))
        return "\n".join(lines)
