"""Parser and emitter for the disassembler listing dialect.

The dialect is what a Metasm-style disassembler prints::

    .section '.text' rwx
    .entrypoint

    // Xrefs: 0c5h
    loc_21h:
        mov rsi, [rdx+50h]                 ; @21h 488b7250 r8:unknown
    db 0bbh, 0f0h, 0b5h ; @0e4h

Untouched lines keep their exact text, so ``emit_listing(parse_listing(x))``
reproduces ``x`` (line endings normalised to LF).
"""

from __future__ import annotations

import re

from .model import (
    BRANCHES,
    COND_JUMPS,
    MNEMONICS,
    OPERAND_COUNTS,
    Imm,
    Instruction,
    LabelRef,
    Line,
    LineKind,
    Mem,
    Program,
    Reg,
)
from .registers import SEGMENTS, lookup


class AsmParseError(ValueError):
    def __init__(self, lineno: int, token: str, message: str):
        super().__init__(f"line {lineno}: {message} ({token!r})")
        self.lineno = lineno
        self.token = token


_LABEL_RE = re.compile(r"^([A-Za-z_.$?][\w.$?@]*):\s*$")
_DATA_RE = re.compile(r"^\s*d[bwdq]\b", re.IGNORECASE)
_IDENT_RE = re.compile(r"^[A-Za-z_.$?][\w.$?@]*$")
_HEX_SUFFIX_RE = re.compile(r"^[0-9][0-9a-fA-F]*[hH]$")
_HEX_PREFIX_RE = re.compile(r"^0[xX][0-9a-fA-F]+$")
_DEC_RE = re.compile(r"^[0-9]+$")
_SIZE_RE = re.compile(r"^(byte|word|dword|qword)\s+ptr\s+(.*)$", re.IGNORECASE)
_SEG_RE = re.compile(r"^([a-z]s):\s*(\[.*\])$", re.IGNORECASE)
_TERM_RE = re.compile(r"\s*([+-]?)\s*([^+\-\s][^+-]*)")


def parse_number(token: str) -> tuple[int, int] | None:
    """Return ``(value, radix)`` for a numeric token, or None."""
    sign = 1
    body = token.strip()
    if body.startswith("-"):
        sign, body = -1, body[1:].strip()
    if _HEX_SUFFIX_RE.match(body):
        value, radix = int(body[:-1], 16), 16
    elif _HEX_PREFIX_RE.match(body):
        value, radix = int(body, 16), 16
    elif _DEC_RE.match(body):
        value, radix = int(body), 10
    else:
        return None
    value *= sign
    if value >= 1 << 63:
        value -= 1 << 64
    if not -(1 << 63) <= value < (1 << 63):
        return None
    return value, radix


def _parse_mem(text: str, lineno: int) -> Mem:
    size = segment = None
    m = _SIZE_RE.match(text)
    if m:
        size, text = m.group(1).lower(), m.group(2).strip()
    m = _SEG_RE.match(text)
    if m:
        segment, text = m.group(1).lower(), m.group(2)
        if segment not in SEGMENTS:
            raise AsmParseError(lineno, segment, "unknown segment")
    if not (text.startswith("[") and text.endswith("]")):
        raise AsmParseError(lineno, text, "malformed memory operand")
    body = text[1:-1].strip()
    if not body:
        raise AsmParseError(lineno, text, "empty memory operand")
    base = index = None
    scale = 1
    disp = 0
    disp_radix = 16
    pos = 0
    for m in _TERM_RE.finditer(body):
        if m.start() != pos:
            raise AsmParseError(lineno, body, "malformed address expression")
        pos = m.end()
        sign, term = m.group(1), m.group(2).strip()
        if "*" in term:
            a, _, b = (t.strip() for t in term.partition("*"))
            if lookup(b) and parse_number(a):
                reg, factor = lookup(b), parse_number(a)[0]
            elif lookup(a) and parse_number(b):
                reg, factor = lookup(a), parse_number(b)[0]
            else:
                raise AsmParseError(lineno, term, "bad scaled index")
            if index is not None or sign == "-" or factor not in (1, 2, 4, 8):
                raise AsmParseError(lineno, term, "bad scaled index")
            index, scale = reg, factor
        elif lookup(term):
            if sign == "-":
                raise AsmParseError(lineno, term, "negated register")
            if base is None:
                base = lookup(term)
            elif index is None:
                index = lookup(term)
            else:
                raise AsmParseError(lineno, term, "too many registers")
        else:
            num = parse_number(term)
            if num is None:
                raise AsmParseError(lineno, term, "bad displacement")
            disp += -num[0] if sign == "-" else num[0]
            disp_radix = num[1]
    if pos != len(body):
        raise AsmParseError(lineno, body, "malformed address expression")
    return Mem(base, index, scale, disp, disp_radix, size, segment)


def parse_operand(text: str, lineno: int, allow_label: bool = False):
    text = text.strip()
    if not text:
        raise AsmParseError(lineno, text, "empty operand")
    if "[" in text:
        return _parse_mem(text, lineno)
    reg = lookup(text)
    if reg is not None:
        return Reg(reg)
    num = parse_number(text)
    if num is not None:
        return Imm(num[0], num[1], text)
    if allow_label and _IDENT_RE.match(text):
        return LabelRef(text)
    raise AsmParseError(lineno, text, "unrecognised operand")


def _check(instr: Instruction, lineno: int, token: str):
    ops = instr.operands
    m = instr.mnemonic
    if len(ops) not in OPERAND_COUNTS[m]:
        raise AsmParseError(lineno, token, f"{m} takes {OPERAND_COUNTS[m][0]} operand(s)")
    if m in COND_JUMPS and not isinstance(ops[0], LabelRef):
        raise AsmParseError(lineno, token, "conditional jump needs a label")
    if len(ops) == 2:
        dst, src = ops
        if isinstance(dst, (Imm, LabelRef)):
            raise AsmParseError(lineno, token, "destination cannot be an immediate")
        if isinstance(dst, Mem) and isinstance(src, Mem):
            raise AsmParseError(lineno, token, "two memory operands")
        if m == "lea" and not (isinstance(dst, Reg) and isinstance(src, Mem)):
            raise AsmParseError(lineno, token, "lea needs reg, [mem]")
        if m == "movzx" and not isinstance(dst, Reg):
            raise AsmParseError(lineno, token, "movzx needs a register destination")
        if m == "xchg" and isinstance(src, Imm):
            raise AsmParseError(lineno, token, "xchg with immediate")
    if m in ("pop", "inc", "dec") and isinstance(ops[0], Imm):
        raise AsmParseError(lineno, token, f"{m} of an immediate")


def parse_instruction(text: str, lineno: int = 0) -> Instruction:
    text = text.strip()
    head, _, rest = text.partition(" ")
    mnemonic = head.lower()
    if mnemonic not in MNEMONICS:
        raise AsmParseError(lineno, head, "unsupported mnemonic")
    rest = rest.strip()
    parts = [p for p in rest.split(",")] if rest else []
    ops = tuple(parse_operand(p, lineno, allow_label=mnemonic in BRANCHES) for p in parts)
    instr = Instruction(mnemonic, ops)
    _check(instr, lineno, text)
    return instr


def _classify(raw: str, lineno: int, uid: int) -> Line:
    stripped = raw.strip()
    if not stripped:
        return Line(LineKind.BLANK, raw, uid=uid)
    if stripped.startswith("//") or stripped.startswith(";"):
        return Line(LineKind.COMMENT, raw, uid=uid)
    if stripped.startswith("."):
        return Line(LineKind.DIRECTIVE, raw, uid=uid)
    if _DATA_RE.match(raw):
        return Line(LineKind.DATA, raw, uid=uid)
    m = _LABEL_RE.match(stripped)
    if m:
        return Line(LineKind.LABEL, raw, label=m.group(1), uid=uid)
    code, sep, comment = raw.partition(";")
    instr = parse_instruction(code, lineno)
    return Line(LineKind.INSTRUCTION, raw, instr, trailing_comment=comment.strip() if sep else None, uid=uid)


def parse_listing(text: str, name: str = "") -> Program:
    """Parse a listing; raises :class:`AsmParseError` on unsupported input."""
    text = text.replace("\r\n", "\n")
    if not text:
        return Program((), name, final_newline=False)
    parts = text.split("\n")
    final_newline = parts[-1] == ""
    if final_newline:
        parts.pop()
    lines = [_classify(raw, i + 1, i) for i, raw in enumerate(parts)]
    try:
        return Program(tuple(lines), name, final_newline)
    except ValueError as exc:
        raise AsmParseError(0, name, str(exc)) from None


def emit_listing(p: Program) -> str:
    body = "\n".join(line.text for line in p.lines)
    return body + ("\n" if p.final_newline and p.lines else "")
