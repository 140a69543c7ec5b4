"""Change-constant records, aggregation, and their CSV shapes."""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from statistics import fmean

from ..transforms.base import Technique
from .constants import change_constant

GROUPS = ("Meterpreter", "Shell", "VncInject", "Single")
# column order of the published constants table
TABLE_ORDER = (Technique.DEAD_CODE, Technique.INSTR_REPLACE, Technique.REGISTER_SUB, Technique.MIXED)


def group_of(payload: str) -> str:
    """``Shell/Bind_tcp`` -> ``Shell``; ``VncInject64/...`` -> ``VncInject``; bare names -> ``Single``."""
    if "/" not in payload:
        return "Single"
    return re.sub(r"\d+$", "", payload.split("/", 1)[0])


@dataclass(frozen=True)
class ChangeConstantRecord:
    payload: str
    technique: Technique
    line_count: int
    change_count: int
    similarity: float
    group: str = ""
    constant: float | None = field(default=None)

    def __post_init__(self):
        if not 0 <= self.similarity <= 100:
            raise ValueError(f"similarity {self.similarity} outside [0, 100]")
        if not self.group:
            object.__setattr__(self, "group", group_of(self.payload))
        if self.change_count > 0:
            object.__setattr__(self, "constant", change_constant(self.similarity, self.change_count))


@dataclass(frozen=True)
class AggregateReport:
    """Means of the change constant.

    ``total_means`` averages the per-group means, which is how the published
    totals are formed; ``pooled_means`` averages all records directly.
    """

    group_means: dict = field(default_factory=dict)  # group -> technique -> mean C
    total_means: dict = field(default_factory=dict)  # technique -> mean of group means
    pooled_means: dict = field(default_factory=dict)  # technique -> mean over records
    similarity_means: dict = field(default_factory=dict)  # technique -> mean S
    excluded: frozenset = frozenset()
    counts: dict = field(default_factory=dict)  # technique -> records used


def aggregate(records, exclude=()) -> AggregateReport:
    """Group and technique means over records with a defined constant.

    Records whose payload is in ``exclude`` are dropped, as are records with
    no changes.
    """
    exclude = frozenset(exclude)
    used = [r for r in records if r.constant is not None and r.payload not in exclude]
    if not used:
        return AggregateReport(excluded=exclude)
    techs = [t for t in Technique if any(r.technique is t for r in used)]
    groups = [g for g in GROUPS if any(r.group == g for r in used)]
    groups += sorted({r.group for r in used} - set(groups))
    group_means: dict = {}
    for g in groups:
        for t in techs:
            vals = [r.constant for r in used if r.group == g and r.technique is t]
            if vals:
                group_means.setdefault(g, {})[t] = fmean(vals)
    total, pooled, sim, counts = {}, {}, {}, {}
    for t in techs:
        mine = [r for r in used if r.technique is t]
        total[t] = fmean(gm[t] for gm in group_means.values() if t in gm)
        pooled[t] = fmean(r.constant for r in mine)
        sim[t] = fmean(r.similarity for r in mine)
        counts[t] = len(mine)
    return AggregateReport(group_means, total, pooled, sim, exclude, counts)


def _num(x) -> str:
    return "" if x is None else repr(float(x))


def records_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["payload", "group", "technique", "lines", "changes", "similarity", "constant"])
    for r in records:
        w.writerow([r.payload, r.group, r.technique.value, r.line_count, r.change_count,
                    _num(r.similarity), _num(r.constant)])
    return buf.getvalue()


def constants_table_csv(records, report: AggregateReport | None = None) -> str:
    """One row per payload, one column per technique, then the mean rows."""
    report = report or aggregate(records)
    cells: dict = {}
    for r in records:
        cells.setdefault(r.payload, {})[r.technique] = r.constant
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["payload"] + [t.value for t in TABLE_ORDER])
    for payload, row in cells.items():
        w.writerow([payload] + [_num(row.get(t)) for t in TABLE_ORDER])
    for g, means in report.group_means.items():
        w.writerow([f"mean:{g}"] + [_num(means.get(t)) for t in TABLE_ORDER])
    w.writerow(["mean:total"] + [_num(report.total_means.get(t)) for t in TABLE_ORDER])
    w.writerow(["mean:pooled"] + [_num(report.pooled_means.get(t)) for t in TABLE_ORDER])
    return buf.getvalue()
