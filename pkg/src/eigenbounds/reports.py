"""Bound reports and their CSV / JSON serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "REL_TOL",
    "THEOREM",
    "CONJECTURE",
    "OUTSIDE_REGIME",
    "NOT_APPLICABLE",
    "DIAGNOSTIC",
    "BoundReport",
    "compare",
    "fmt",
    "reports_to_csv",
    "reports_to_json",
    "series_to_csv",
]

REL_TOL = 1e-9

THEOREM = "theorem"
CONJECTURE = "conjecture"
OUTSIDE_REGIME = "outside-regime"
NOT_APPLICABLE = "not-applicable"
DIAGNOSTIC = "diagnostic"

CSV_COLUMNS = ("bound_id", "k", "lhs", "rhs", "margin", "satisfied")


@dataclass(frozen=True)
class BoundReport:
    """One evaluated inequality.

    ``margin`` is signed so that the inequality holds iff margin >= 0;
    ``satisfied`` allows a relative slack of REL_TOL for equality cases.
    ``status`` says whether a failure is a real violation (``theorem``) or
    informational (conjecture, outside the stated regime, not applicable).
    """

    bound_id: str
    argument: float
    lhs: float
    rhs: float
    sense: str
    margin: float
    satisfied: bool
    status: str = THEOREM
    argument_name: str = "k"
    context: str = ""

    @property
    def violated(self) -> bool:
        """True only for a failed check whose status is a theorem."""
        return self.status == THEOREM and not self.satisfied

    def as_dict(self) -> dict:
        return {
            "bound_id": self.bound_id,
            self.argument_name: _num(self.argument),
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "margin": _num(self.margin),
            "satisfied": self.satisfied,
            "status": self.status,
            "context": self.context,
        }


def compare(bound_id: str, argument, lhs: float, rhs: float, sense: str = "<=", *,
            status: str = THEOREM, argument_name: str = "k", context: str = "",
            tol: float = REL_TOL) -> BoundReport:
    """Build a report for ``lhs <= rhs`` (sense "<=") or ``lhs >= rhs`` (sense ">=")."""
    lhs = float(lhs)
    rhs = float(rhs)
    if sense == "<=":
        margin = rhs - lhs
    elif sense == ">=":
        margin = lhs - rhs
    else:
        raise ValueError(f"sense must be '<=' or '>=', got {sense!r}")
    if math.isnan(margin):
        # inf - inf: both sides infinite, treat as equality.
        margin = 0.0
    scale = max(1.0, abs(rhs)) if math.isfinite(rhs) else 1.0
    satisfied = bool(margin >= -tol * scale)
    return BoundReport(bound_id, argument, lhs, rhs, sense, margin, satisfied,
                       status=status, argument_name=argument_name, context=context)


def fmt(x) -> str:
    """15 significant digits; integers and booleans verbatim."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return f"{x:.15g}"


def _num(x):
    if isinstance(x, (bool, int)):
        return x
    x = float(x)
    if not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return float(f"{x:.15g}")


def reports_to_csv(reports: Iterable[BoundReport], extra: Sequence[str] = ("status",)) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS + tuple(extra))
    for r in reports:
        row = [r.bound_id, fmt(r.argument), fmt(r.lhs), fmt(r.rhs), fmt(r.margin), fmt(r.satisfied)]
        row.extend(str(getattr(r, name)) for name in extra)
        writer.writerow(row)
    return buf.getvalue()


def reports_to_json(reports: Iterable[BoundReport]) -> str:
    records = []
    for r in reports:
        d = r.as_dict()
        # Keep the shared column name 'k' even for z / t arguments.
        d = {"bound_id": d.pop("bound_id"), "k": d.pop(r.argument_name), "argument_name": r.argument_name, **d}
        records.append(d)
    return json.dumps(records, indent=1) + "\n"


def series_to_csv(rows: Iterable[Sequence[float]], argument: str = "z") -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow((argument, "value", "limit", "relative_deviation"))
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()
