"""Shared types for the transformation passes."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum

from ..asm.model import Line, Program


class Technique(str, Enum):
    DEAD_CODE = "DeadCode"
    REGISTER_SUB = "RegisterSub"
    INSTR_REPLACE = "InstrReplace"
    MIXED = "Mixed"

    @property
    def suffix(self) -> str:
        return _SUFFIX[self]

    @classmethod
    def from_short(cls, name: str) -> "Technique":
        for t, s in _SUFFIX.items():
            if name in (s, t.value, t.name.lower()):
                return t
        raise ValueError(f"unknown technique {name!r}")


_SUFFIX = {
    Technique.DEAD_CODE: "dead",
    Technique.REGISTER_SUB: "reg",
    Technique.INSTR_REPLACE: "ins",
    Technique.MIXED: "mix",
}


class ChangeKind(str, Enum):
    INSERTED = "inserted"
    RENAMED = "register-renamed"
    REPLACED = "instruction-replaced"


class ChangeLogMismatch(ValueError):
    """A log was counted under a technique other than the one that produced it."""


@dataclass(frozen=True)
class TransformConfig:
    seed: int = 0
    insertion_period_min: int = 4
    insertion_period_max: int = 5
    region_min_len: int = 6

    def __post_init__(self):
        if not 1 <= self.insertion_period_min <= self.insertion_period_max:
            raise ValueError("need 1 <= insertion_period_min <= insertion_period_max")
        if self.region_min_len < 2:
            raise ValueError("region_min_len must be at least 2")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class ChangeEntry:
    line: int  # 1-based line number in the emitted output
    kind: ChangeKind
    technique: Technique
    detail: str
    uid: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class ChangeLog:
    technique: Technique
    entries: tuple[ChangeEntry, ...] = ()

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["line", "kind", "technique", "detail"])
        for e in self.entries:
            w.writerow([e.line, e.kind.value, e.technique.value, e.detail])
        return buf.getvalue()


def count_changes(log: ChangeLog, t: Technique) -> int:
    if log.technique is not t:
        raise ChangeLogMismatch(f"log from {log.technique.value} counted as {t.value}")
    if t is Technique.DEAD_CODE:
        return sum(1 for e in log.entries if e.kind is ChangeKind.INSERTED)
    if t is Technique.REGISTER_SUB:
        return len(log.entries)  # one entry per renamed or inserted line
    # a source line rewritten into two lines still counts once
    return len({e.uid for e in log.entries})


@dataclass(frozen=True)
class TransformResult:
    program: Program
    log: ChangeLog
    change_count: int
    # origin[i]: index of the input line output line i descends from (None if inserted)
    origin: tuple = field(default=(), compare=False, repr=False)


class Rewriter:
    """Accumulates output lines, their provenance, and change marks."""

    def __init__(self, program: Program, technique: Technique):
        self.program = program
        self.technique = technique
        self.lines: list[Line] = []
        self.origin: list[int | None] = []
        self.marks: dict[int, list[tuple[ChangeKind, Technique, str]]] = {}
        self._uid = program.next_uid()

    def fresh_uid(self) -> int:
        self._uid += 1
        return self._uid - 1

    def keep(self, line: Line, src: int | None) -> None:
        self.lines.append(line)
        self.origin.append(src)

    def emit(self, line: Line, src: int | None, kind: ChangeKind, detail: str) -> None:
        self.marks[len(self.lines)] = [(kind, self.technique, detail)]
        self.keep(line, src)

    def finish(self, marks=None) -> TransformResult:
        marks = self.marks if marks is None else marks
        entries = tuple(
            ChangeEntry(i + 1, kind, tech, detail, self.lines[i].uid)
            for i in sorted(marks)
            for kind, tech, detail in marks[i]
        )
        log = ChangeLog(self.technique, entries)
        return TransformResult(self.program.with_lines(self.lines), log,
                               count_changes(log, self.technique), tuple(self.origin))
