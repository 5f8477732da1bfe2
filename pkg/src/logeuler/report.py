"""Machine-readable verification reports."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

PASS, FAIL, XFAIL, XPASS = "pass", "fail", "xfail", "xpass"

# exit codes
EXIT_OK = 0
EXIT_CHECK = 1
EXIT_ADMISSIBILITY = 2
EXIT_RECOVERY = 3
EXIT_CONFIG = 64


@dataclass
class Check:
    name: str
    status: str
    metric: float
    tolerance: float
    anchor: str
    kind: str = "property"  # property | admissibility | recovery
    message: str = ""

    @property
    def failed(self) -> bool:
        return self.status in (FAIL, XPASS)


def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def check(name, ok, metric, tolerance, anchor, *, kind="property", expect_fail=False, note=""):
    """Build a :class:`Check`; failed checks name the violated condition."""
    if expect_fail:
        status = XFAIL if not ok else XPASS
    else:
        status = PASS if ok else FAIL
    msg = note
    if status == FAIL:
        msg = f"violates {anchor}: metric {metric:.6g} against tolerance {tolerance:.6g}"
        if note:
            msg += f" ({note})"
    elif status == XPASS:
        msg = f"expected to fail ({anchor}) but passed with metric {metric:.6g}"
    elif status == XFAIL:
        msg = f"fails as expected: {anchor} does not hold" + (f" ({note})" if note else "")
    return Check(name, status, float(metric), float(tolerance), anchor, kind, msg)


@dataclass
class Report:
    command: str
    seed: int
    checks: list = field(default_factory=list)
    artifacts: list = field(default_factory=list)
    error: str | None = None
    error_code: int | None = None

    def add(self, c: Check):
        self.checks.append(c)
        return c

    @property
    def failed(self):
        return [c for c in self.checks if c.failed]

    @property
    def exit_code(self) -> int:
        if self.error_code is not None:
            return self.error_code
        bad = self.failed
        if not bad:
            return EXIT_OK
        kinds = {c.kind for c in bad}
        if "admissibility" in kinds:
            return EXIT_ADMISSIBILITY
        if "recovery" in kinds:
            return EXIT_RECOVERY
        return EXIT_CHECK

    def to_dict(self):
        checks = []
        for c in self.checks:
            d = asdict(c)
            d["metric"] = _finite(d["metric"])
            d["tolerance"] = _finite(d["tolerance"])
            checks.append(d)
        return {
            "command": self.command,
            "seed": self.seed,
            "exit_code": self.exit_code,
            "error": self.error,
            "checks": checks,
            "artifacts": list(self.artifacts),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def summary(self) -> str:
        lines = [f"logeuler {self.command} (seed {self.seed})"]
        for c in self.checks:
            lines.append(f"  {c.status.upper():5s} {c.name}: metric={c.metric:.6g} tol={c.tolerance:.6g}"
                         + (f"  [{c.message}]" if c.failed or c.status == XFAIL else ""))
        if self.error:
            lines.append(f"  ERROR {self.error}")
        for a in self.artifacts:
            lines.append(f"  wrote {a}")
        lines.append(f"  {len(self.checks)} checks, {len(self.failed)} failed, exit {self.exit_code}")
        return "\n".join(lines)
