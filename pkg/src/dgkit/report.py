"""Line-oriented pass/fail reports shared by the validators and verification suites."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        return f"{tag} {self.name}" + (f": {self.detail}" if self.detail else "")


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add(self, name, ok, detail=""):
        self.checks.append(Check(name, bool(ok), detail))
        return bool(ok)

    def note(self, text):
        if text not in self.notes:
            self.notes.append(text)

    def extend(self, other: "Report", prefix=""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.ok, c.detail))
        self.notes.extend(n for n in other.notes if n not in self.notes)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c.ok]

    def first_failure(self):
        f = self.failures
        return f[0] if f else None

    def lines(self, verbose=False) -> list[str]:
        out = [f"== {self.title}"]
        for c in self.checks:
            if verbose or not c.ok:
                out.append(c.line())
        out.extend(f"note: {n}" for n in self.notes)
        npass = sum(c.ok for c in self.checks)
        out.append(f"{'OK' if self.ok else 'FAILED'} {npass}/{len(self.checks)} checks")
        return out

    def render(self, verbose=False) -> str:
        return "\n".join(self.lines(verbose)) + "\n"

    def __bool__(self):
        return self.ok
