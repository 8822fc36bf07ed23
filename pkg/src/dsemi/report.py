"""Check records, tolerance policy and deterministic JSON-lines output."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from mpmath import mp, mpf

OUT_OF_SCOPE = "out of scope"
PRECISION_LIMITED = "precision-limited"


def fmt_real(x, digits: int = 6) -> str:
    """Fixed-format nonnegative residual or tolerance."""
    x = mpf(abs(x))
    if x == 0:
        return "0"
    return mp.nstr(x, digits, min_fixed=1, max_fixed=0)


def fmt_value(z, digits: int = 30) -> str:
    """A state value: the real part alone when the imaginary part is negligible."""
    z = mp.mpc(z)
    if abs(z.imag) <= mpf(10) ** (-digits) * max(abs(z), 1):
        return mp.nstr(z.real, digits)
    return "%s%s%sj" % (mp.nstr(z.real, digits), "+" if z.imag >= 0 else "-", mp.nstr(abs(z.imag), digits))


def effective_tolerance(target: float, loss: float, precision: int) -> tuple:
    """Tolerance actually applied and whether it was relaxed.

    ``loss`` is the number of digits the check is expected to lose; when
    10^(loss - P) exceeds the requested target the former is used instead.
    """
    floor = mpf(10) ** (loss - precision)
    tgt = mpf(target)
    if floor > tgt:
        return floor, True
    return tgt, False


@dataclass(frozen=True)
class CheckRecord:
    suite: str
    check_id: str
    paper_anchor: str
    max_residual: mpf | None
    tolerance: mpf | None
    precision_limited: bool = False
    status: str | None = None

    @property
    def passed(self) -> bool | None:
        if self.status == OUT_OF_SCOPE:
            return None
        return bool(self.max_residual < self.tolerance)

    def as_dict(self) -> dict:
        d = {
            "suite": self.suite,
            "check_id": self.check_id,
            "paper_anchor": self.paper_anchor,
            "max_residual": None if self.max_residual is None else fmt_real(self.max_residual),
            "tolerance": None if self.tolerance is None else fmt_real(self.tolerance, 3),
            "pass": self.passed,
        }
        if self.status is not None:
            d["status"] = self.status
        elif self.precision_limited:
            d["status"] = PRECISION_LIMITED
        return d


def dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=False, ensure_ascii=False, separators=(", ", ": "))


def environment_record(precision: int, seed: int, config_hash: str, kind: str = "verify") -> dict:
    return {"environment": {"kind": kind, "precision": precision, "seed": seed, "config_hash": config_hash}}


def render(env: dict, records: Iterable[CheckRecord]) -> str:
    lines = [dumps(env)] + [dumps(r.as_dict()) for r in records]
    return "\n".join(lines) + "\n"


def exit_status(records: Iterable[CheckRecord]) -> int:
    return 1 if any(r.passed is False for r in records) else 0
