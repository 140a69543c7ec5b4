"""Register and flag facts used to keep rewrites safe."""

from __future__ import annotations

from ..asm.model import BRANCHES, COND_JUMPS, Instruction, Line, LineKind, Mem, Reg
from ..asm.registers import FAMILIES, Register, lookup

FLAG_READERS = COND_JUMPS
FULL_FLAG_WRITERS = frozenset({"add", "sub", "xor", "and", "or", "test", "cmp"})
# instructions that consume their first operand without writing it
_NO_WRITE = frozenset({"push", "test", "cmp", "call", "jmp", "nop"}) | COND_JUMPS

IMPLICIT = {
    "lodsb": ("rsi", "rax"),
    "pushad": FAMILIES,
    "popad": FAMILIES,
    "push": ("rsp",),
    "pop": ("rsp",),
    "call": ("rsp",),
    "loop": ("rcx",),
    "jrcxz": ("rcx",),
    "jecxz": ("rcx",),
}


def explicit_registers(instr: Instruction) -> list[Register]:
    """Every register named in the operands, address registers included."""
    out = []
    for op in instr.operands:
        if isinstance(op, Reg):
            out.append(op.reg)
        elif isinstance(op, Mem):
            out.extend(op.registers)
    return out


def written_families(instr: Instruction) -> list[str]:
    m, ops = instr.mnemonic, instr.operands
    if m in _NO_WRITE or not ops:
        return []
    fams = []
    if isinstance(ops[0], Reg):
        fams.append(ops[0].reg.family)
    if m == "xchg" and len(ops) == 2 and isinstance(ops[1], Reg):
        fams.append(ops[1].reg.family)
    return fams


def used_families(instr: Instruction) -> set[str]:
    fams = {r.family for r in explicit_registers(instr)}
    fams.update(IMPLICIT.get(instr.mnemonic, ()))
    return fams


def flags_dead_after(lines: list[Line], i: int) -> bool:
    """True if no flag value live after line ``i`` can be observed.

    Scans forward within the block: a flag reader means live, a full flag
    writer means dead.  Labels, branches, data and directives end the scan
    as live; reaching the end of the program counts as dead.
    """
    for line in lines[i + 1:]:
        if line.kind in (LineKind.COMMENT, LineKind.BLANK):
            continue
        if line.kind is not LineKind.INSTRUCTION:
            return False
        m = line.instruction.mnemonic
        if m in FLAG_READERS or m in BRANCHES:
            return False
        if m in FULL_FLAG_WRITERS:
            return True
    return True


def is_reg(op, width: int | None = None) -> bool:
    return isinstance(op, Reg) and not op.reg.high and (width is None or op.reg.width == width)


def reg64(family: str) -> Reg:
    return Reg(lookup(family))
