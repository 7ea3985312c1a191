"""Machine-readable verification reports with deterministic serialization.

Reports are emitted as JSON with sorted keys and a fixed float rendering
(17 significant digits), so identical inputs and seeds produce
byte-identical output. Complex values render as [re, im] pairs.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional


def _format_float(x: float) -> str:
    if x != x:
        return '"nan"'
    if x in (float("inf"), float("-inf")):
        return f'"{x}"'
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return f"{x:.17g}"


def _escape(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def canonical_json(obj, indent: int = 0) -> str:
    """Deterministic JSON: dict keys sorted, floats at 17 significant
    digits, complex numbers as [re, im]."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, complex):
        return (f"[{_format_float(obj.real)}, {_format_float(obj.imag)}]")
    if isinstance(obj, str):
        return _escape(obj)
    if isinstance(obj, dict):
        keys = sorted(obj.keys(), key=str)
        if not keys:
            return "{}"
        items = [f"{inner}{_escape(str(k))}: "
                 f"{canonical_json(obj[k], indent + 1)}" for k in keys]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{canonical_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    # numpy scalars and anything with .item()
    if hasattr(obj, "item"):
        return canonical_json(obj.item(), indent)
    return _escape(repr(obj))


def digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def digest_text(text: str) -> str:
    return digest_bytes(text.encode("utf-8"))


@dataclass
class Report:
    """Verification report for one CLI command.

    The overall flag is the conjunction of the per-check flags; extras
    carry structural results (block sizes, dimensions) that are data, not
    checks.
    """
    command: str
    seed: int
    tolerance: float
    inputs: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def add_check(self, name: str, passed: bool,
                  residual: Optional[float] = None,
                  witness: Optional[str] = None):
        self.checks.append({
            "name": name,
            "pass": bool(passed),
            "residual": None if residual is None else float(residual),
            "witness": witness,
        })

    def add_entries(self, entries, prefix: str = ""):
        for e in entries:
            self.add_check(prefix + e.name, e.passed, e.residual, e.witness)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def as_dict(self) -> dict:
        body = {
            "command": self.command,
            "inputs": self.inputs,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "checks": self.checks,
            "pass": self.passed,
        }
        body.update(self.extras)
        return body

    def to_json(self) -> str:
        return canonical_json(self.as_dict()) + "\n"

    def summary_lines(self):
        for c in self.checks:
            status = "PASS" if c["pass"] else "FAIL"
            extra = ""
            if c["residual"] is not None:
                extra = f" residual={c['residual']:.3e}"
            if c["witness"]:
                extra += f" witness={c['witness']}"
            yield f"[{status}] {c['name']}{extra}"
        yield f"overall: {'PASS' if self.passed else 'FAIL'}"
