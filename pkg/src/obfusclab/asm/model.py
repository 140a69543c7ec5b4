"""Typed representation of a textual x86-64 listing."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from .registers import Register

INDENT = "    "

# closed mnemonic subset; anything else is rejected by the parser
DATA_MOVES = frozenset({"mov", "movzx", "lea", "xchg", "push", "pop"})
ALU = frozenset({"add", "sub", "xor", "and", "or", "test", "cmp", "inc", "dec", "ror"})
COND_JUMPS = frozenset({"jz", "jnz", "jl", "jrcxz", "jecxz", "loop"})
BRANCHES = frozenset({"call", "jmp"}) | COND_JUMPS
MISC = frozenset({"nop", "lodsb", "cld", "pushad", "popad"})
MNEMONICS = DATA_MOVES | ALU | BRANCHES | MISC

OPERAND_COUNTS = {
    **{m: (2,) for m in ("mov", "movzx", "lea", "xchg", "add", "sub", "xor", "and", "or", "test", "cmp", "ror")},
    **{m: (1,) for m in ("push", "pop", "inc", "dec", "call", "jmp")},
    **{m: (1,) for m in COND_JUMPS},
    **{m: (0,) for m in MISC},
}

SIZE_BITS = {"byte": 8, "word": 16, "dword": 32, "qword": 64}


@dataclass(frozen=True)
class Reg:
    reg: Register

    def __str__(self) -> str:
        return self.reg.name


def format_number(value: int, radix: int) -> str:
    """Render ``value`` in the listing's notation (``1a0h``, ``0ffh``, ``-10h``, ``12``)."""
    if radix == 10:
        return str(value)
    sign = "-" if value < 0 else ""
    digits = f"{abs(value):x}"
    if digits[0] in "abcdef":
        digits = "0" + digits
    return f"{sign}{digits}h"


@dataclass(frozen=True)
class Imm:
    value: int  # signed 64-bit
    radix: int = 10
    token: str | None = None  # original spelling, reused on emission

    def __str__(self) -> str:
        return self.token if self.token is not None else format_number(self.value, self.radix)


@dataclass(frozen=True)
class Mem:
    base: Register | None = None
    index: Register | None = None
    scale: int = 1
    disp: int = 0
    disp_radix: int = 16
    size: str | None = None  # byte/word/dword/qword
    segment: str | None = None

    def __post_init__(self):
        if self.scale not in (1, 2, 4, 8):
            raise ValueError(f"bad scale {self.scale}")

    def __str__(self) -> str:
        terms = []
        if self.base is not None:
            terms.append(self.base.name)
        if self.index is not None:
            terms.append(self.index.name if self.scale == 1 else f"{self.scale}*{self.index.name}")
        body = "+".join(terms)
        if self.disp or not terms:
            num = format_number(abs(self.disp) if terms else self.disp, self.disp_radix)
            if not terms:
                body = num
            else:
                body += ("-" if self.disp < 0 else "+") + num
        prefix = f"{self.size} ptr " if self.size else ""
        seg = f"{self.segment}:" if self.segment else ""
        return f"{prefix}{seg}[{body}]"

    @property
    def registers(self) -> tuple[Register, ...]:
        return tuple(r for r in (self.base, self.index) if r is not None)


@dataclass(frozen=True)
class LabelRef:
    name: str

    def __str__(self) -> str:
        return self.name


Operand = Union[Reg, Imm, Mem, LabelRef]


@dataclass(frozen=True)
class Instruction:
    mnemonic: str
    operands: tuple = ()

    def __str__(self) -> str:
        if not self.operands:
            return self.mnemonic
        return f"{self.mnemonic} " + ", ".join(str(o) for o in self.operands)


class LineKind(str, Enum):
    INSTRUCTION = "instruction"
    LABEL = "label-def"
    DIRECTIVE = "directive"
    DATA = "data"
    COMMENT = "comment"
    BLANK = "blank"


@dataclass(frozen=True)
class Line:
    """One listing line.

    ``raw`` is the exact source text for untouched lines; synthesized or
    rewritten lines carry ``raw=None`` and are emitted canonically.  ``uid``
    identifies the source line a line descends from so that multi-stage
    rewrites can be attributed back to one origin.
    """

    kind: LineKind
    raw: str | None = None
    instruction: Instruction | None = None
    label: str | None = None
    trailing_comment: str | None = None
    uid: int = -1

    @property
    def text(self) -> str:
        if self.raw is not None:
            return self.raw
        if self.kind is LineKind.INSTRUCTION:
            return INDENT + str(self.instruction)
        if self.kind is LineKind.LABEL:
            return f"{self.label}:"
        return ""

    @property
    def is_instruction(self) -> bool:
        return self.kind is LineKind.INSTRUCTION


def synth(instr: Instruction, uid: int) -> Line:
    return Line(LineKind.INSTRUCTION, None, instr, uid=uid)


@dataclass(frozen=True)
class Program:
    lines: tuple[Line, ...] = ()
    name: str = ""
    final_newline: bool = True
    labels: frozenset = field(default=frozenset(), compare=False)

    def __post_init__(self):
        seen = set()
        for line in self.lines:
            if line.kind is LineKind.LABEL:
                if line.label in seen:
                    raise ValueError(f"duplicate label {line.label!r}")
                seen.add(line.label)
        object.__setattr__(self, "labels", frozenset(seen))

    def instructions(self) -> list[Instruction]:
        return [ln.instruction for ln in self.lines if ln.kind is LineKind.INSTRUCTION]

    def next_uid(self) -> int:
        return max((ln.uid for ln in self.lines), default=-1) + 1

    def with_lines(self, lines) -> "Program":
        return Program(tuple(lines), self.name, self.final_newline)


def instruction_line_count(p: Program) -> int:
    """Number of instruction lines (labels, directives, data, comments and blanks excluded)."""
    return sum(1 for ln in p.lines if ln.kind is LineKind.INSTRUCTION)
