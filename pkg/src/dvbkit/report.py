"""Check results shared by every verification suite."""

from dataclasses import dataclass, field


def summarize(value, limit=120):
    """Short printable summary of a residual (Poly, PolyMatrix, list, ...)."""
    if value is None:
        return ""
    if hasattr(value, "to_str"):
        s = value.to_str()
    elif isinstance(value, (list, tuple)):
        s = "[" + ", ".join(summarize(v, limit) for v in value) + "]"
    else:
        s = repr(value)
    return s if len(s) <= limit else s[:limit - 3] + "..."


def is_zero_value(value):
    if value is None:
        return True
    if hasattr(value, "is_zero"):
        return value.is_zero()
    if isinstance(value, (list, tuple)):
        return all(is_zero_value(v) for v in value)
    if isinstance(value, dict):
        return all(is_zero_value(v) for v in value.values())
    return value == 0


@dataclass
class Check:
    name: str
    ok: bool
    residual: str = ""
    witness: object = None

    def to_dict(self):
        d = {"name": self.name, "status": "pass" if self.ok else "fail", "residual": self.residual}
        if self.witness is not None:
            d["witness"] = [str(x) for x in self.witness]
        return d


@dataclass
class Report:
    suite: str
    checks: list = field(default_factory=list)

    def add(self, name, ok, residual="", witness=None):
        self.checks.append(Check(name, bool(ok), residual, witness))
        return ok

    def add_residual(self, name, value):
        """Record a residual that must vanish exactly."""
        ok = is_zero_value(value)
        return self.add(name, ok, "" if ok else summarize(value))

    def extend(self, other, prefix=""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.ok, c.residual, c.witness))
        return self

    @property
    def ok(self):
        return all(c.ok for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.ok]

    def failed_names(self):
        return [c.name for c in self.checks if not c.ok]

    def to_dict(self):
        return {"suite": self.suite, "verdict": "pass" if self.ok else "fail",
                "checks": [c.to_dict() for c in self.checks]}

    def text(self):
        lines = [f"suite {self.suite}: {'PASS' if self.ok else 'FAIL'} "
                 f"({len(self.checks) - len(self.failures())}/{len(self.checks)} checks)"]
        for c in self.failures():
            lines.append(f"  FAIL {c.name}: {c.residual}")
        return "\n".join(lines)

    def __bool__(self):
        return self.ok
