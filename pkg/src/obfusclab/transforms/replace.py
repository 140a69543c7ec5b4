"""Instruction replacement with equivalent forms."""

from __future__ import annotations

from ..asm.model import Imm, Instruction, Program, Reg, synth
from ..rng import SplitMix64
from .analysis import flags_dead_after, is_reg
from .base import ChangeKind, Rewriter, Technique, TransformConfig, TransformResult

ZERO = Imm(0, 10, "0")


def _zeroing(r: Reg, variant: int) -> Instruction:
    return (Instruction("xor", (r, r)), Instruction("and", (r, ZERO)), Instruction("sub", (r, r)))[variant]


def rewrite(ins: Instruction, flags_dead: bool, rng: SplitMix64) -> list[Instruction] | None:
    """Replacement for ``ins``, or None when no catalog entry applies safely."""
    m, ops = ins.mnemonic, ins.operands
    if len(ops) != 2:
        return None
    dst, src = ops
    if m == "mov" and is_reg(dst) and isinstance(src, Imm) and src.value == 0 and flags_dead:
        return [_zeroing(dst, rng.randint(0, 2))]
    if (m == "mov" and is_reg(dst, 64) and is_reg(src, 64)
            and "rsp" not in (dst.reg.family, src.reg.family)):
        # only the 64-bit forms: push/pop have no 32-bit encoding here
        return [Instruction("push", (src,)), Instruction("pop", (dst,))]
    if m == "test" and is_reg(dst) and dst == src:
        return [Instruction("cmp", (dst, ZERO))]
    if m in ("add", "sub") and is_reg(dst) and isinstance(src, Imm) and src.value == 1 and flags_dead:
        # inc/dec leave CF alone, so the flags must not be read afterwards
        return [Instruction("inc" if m == "add" else "dec", (dst,))]
    return None


def replace_instructions(p: Program, cfg: TransformConfig) -> TransformResult:
    """Rewrite every line matching the catalog where it is safe to do so."""
    rng = SplitMix64(cfg.seed)
    lines = list(p.lines)
    rw = Rewriter(p, Technique.INSTR_REPLACE)
    for i, line in enumerate(lines):
        new = rewrite(line.instruction, flags_dead_after(lines, i), rng) if line.is_instruction else None
        if not new:
            rw.keep(line, i)
            continue
        for ins in new:
            rw.emit(synth(ins, line.uid), i, ChangeKind.REPLACED, f"{line.instruction} -> {ins}")
    return rw.finish()
