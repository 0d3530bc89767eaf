"""Audit outcomes shared by every checker."""

from __future__ import annotations

from dataclasses import dataclass, field

PASS = "PASS"
FAIL = "FAIL"
SKIP = "SKIP"
ERROR = "ERROR"


class PreconditionError(ValueError):
    """An audit was asked to run on inputs that violate its hypothesis."""


@dataclass
class AuditReport:
    theorem: str
    status: str
    algebra: str = ""
    witness: dict | None = None
    vacuous: bool = False
    notes: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def record(self) -> dict:
        rec = {
            "theorem": self.theorem,
            "algebra": self.algebra,
            "status": self.status,
            "witness": self.witness,
            "vacuous": self.vacuous,
        }
        if self.notes:
            rec["notes"] = list(self.notes)
        return rec

    def summary(self) -> str:
        head = f"{self.status:5} {self.theorem}"
        if self.algebra:
            head += f" [{self.algebra}]"
        if self.vacuous:
            head += " (vacuous)"
        lines = [head]
        if self.witness:
            lines.append("      witness: " + ", ".join(f"{k}={v}" for k, v in self.witness.items()))
        lines.extend("      note: " + n for n in self.notes)
        return "\n".join(lines)


def passed(theorem, algebra="", **kw) -> AuditReport:
    return AuditReport(theorem, PASS, algebra, **kw)


def failed(theorem, algebra="", witness=None, **kw) -> AuditReport:
    return AuditReport(theorem, FAIL, algebra, witness=witness, **kw)


def combine(theorem, algebra, parts, notes=()) -> AuditReport:
    """Fold sub-reports: first FAIL/ERROR wins, PASS only if all parts pass."""
    parts = list(parts)
    status = PASS
    witness = None
    for part in parts:
        if part.status in (FAIL, ERROR):
            status, witness = part.status, {"check": part.theorem, **(part.witness or {})}
            break
    if status == PASS and parts and all(p.status == SKIP for p in parts):
        status = SKIP
    rep = AuditReport(theorem, status, algebra, witness,
                      vacuous=bool(parts) and all(p.vacuous for p in parts), notes=list(notes))
    for part in parts:
        rep.notes.extend(part.notes)
    rep.details["parts"] = [(p.theorem, p.status) for p in parts]
    return rep
