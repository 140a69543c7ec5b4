"""The published per-payload scores and change counts, bundled as CSV."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources

from ..transforms.base import Technique
from .records import ChangeConstantRecord

_COLUMNS = {
    Technique.DEAD_CODE: "dead",
    Technique.INSTR_REPLACE: "ins",
    Technique.REGISTER_SUB: "reg",
    Technique.MIXED: "mix",
}


@dataclass(frozen=True)
class PayloadRow:
    group: str
    payload: str
    short_name: str
    lines: int | None
    scores: dict  # Technique -> int
    changes: dict  # Technique -> int

    @property
    def missing(self) -> bool:
        return self.lines is None


def load_rows() -> list[PayloadRow]:
    text = resources.files("obfusclab.data").joinpath("reference_data.csv").read_text()
    rows = []
    for r in csv.DictReader(text.splitlines()):
        present = bool(r["lines"])
        rows.append(PayloadRow(
            r["group"], r["payload"], r["short_name"],
            int(r["lines"]) if present else None,
            {t: int(r[f"{c}_score"]) for t, c in _COLUMNS.items()} if present else {},
            {t: int(r[f"{c}_changes"]) for t, c in _COLUMNS.items()} if present else {},
        ))
    return rows


def reference_records() -> list[ChangeConstantRecord]:
    """Records for every processed payload; unprocessed payloads yield none."""
    return [
        ChangeConstantRecord(row.payload, t, row.lines, row.changes[t], row.scores[t], row.group)
        for row in load_rows() if not row.missing
        for t in _COLUMNS
    ]


def missing_payloads() -> list[str]:
    return [row.payload for row in load_rows() if row.missing]
