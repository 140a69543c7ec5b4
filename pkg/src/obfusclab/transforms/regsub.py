"""Register substitution: permute register contents with xchg and rename uses.

Inside a region every permuted family ``f`` is spelled ``rho(f)``.  Before
the region an xchg sequence moves each value into its new home; after it
the same sequence in reverse order puts every value back.
"""

from __future__ import annotations

from dataclasses import replace

from ..asm.model import BRANCHES, Instruction, LineKind, Mem, Program, Reg, synth
from ..asm.registers import FAMILY_INDEX, register_for
from ..rng import SplitMix64
from .analysis import IMPLICIT, explicit_registers, reg64
from .base import ChangeKind, Rewriter, Technique, TransformConfig, TransformResult

EXCLUDED = frozenset({"rsp", "rbp"})


def blocks(lines) -> list[list[int]]:
    """Runs of straight-line instruction indices, split at labels, data, directives and branches."""
    out, cur = [], []
    for i, line in enumerate(lines):
        if line.kind in (LineKind.COMMENT, LineKind.BLANK):
            continue
        if line.kind is LineKind.INSTRUCTION and line.instruction.mnemonic not in BRANCHES:
            cur.append(i)
            continue
        if cur:
            out.append(cur)
        cur = []
    if cur:
        out.append(cur)
    return out


def eligible_families(instrs) -> list[str]:
    """Families used at one width, never via a high byte nor implicitly."""
    widths: dict[str, set] = {}
    banned = set(EXCLUDED)
    for ins in instrs:
        banned.update(IMPLICIT.get(ins.mnemonic, ()) if ins.mnemonic not in ("push", "pop") else ())
        for r in explicit_registers(ins):
            widths.setdefault(r.family, set()).add(r.width)
            if r.high:
                banned.add(r.family)
    return sorted((f for f, w in widths.items() if len(w) == 1 and f not in banned),
                  key=FAMILY_INDEX.__getitem__)


def xchg_sequence(rho: dict[str, str]) -> list[tuple[str, str]]:
    """Swaps that leave the value of ``f`` in ``rho[f]`` for every permuted family."""
    want = {dst: src for src, dst in rho.items()}
    held = {f: f for f in rho}
    seq = []
    for pos in sorted(rho, key=FAMILY_INDEX.__getitem__, reverse=True):
        if held[pos] == want[pos]:
            continue
        other = next(q for q in held if held[q] == want[pos])
        a, b = sorted((pos, other), key=FAMILY_INDEX.__getitem__)
        seq.append((a, b))
        held[a], held[b] = held[b], held[a]
    return seq


def _rename_operand(op, rho):
    if isinstance(op, Reg) and op.reg.family in rho:
        return Reg(register_for(rho[op.reg.family], op.reg.width))
    if isinstance(op, Mem):
        sub = {}
        for field in ("base", "index"):
            r = getattr(op, field)
            if r is not None and r.family in rho:
                sub[field] = register_for(rho[r.family], r.width)
        if sub:
            return replace(op, **sub)
    return op


def rename(ins: Instruction, rho: dict[str, str]) -> Instruction:
    return Instruction(ins.mnemonic, tuple(_rename_operand(o, rho) for o in ins.operands))


def _touches(ins: Instruction, fams) -> bool:
    return any(r.family in fams for r in explicit_registers(ins))


def substitute_registers(p: Program, cfg: TransformConfig, cycle: dict[str, str] | None = None) -> TransformResult:
    """Apply a register 3-cycle to every straight-line block long enough to host one.

    ``cycle`` pins the renaming (``{"r14": "r12", ...}``) instead of drawing it
    from the seed; blocks where it is not safe are left alone.
    """
    rng = SplitMix64(cfg.seed)
    lines = list(p.lines)
    plans = {}  # first line index -> (last line index, rho)
    for blk in blocks(lines):
        if len(blk) < cfg.region_min_len:
            continue
        instrs = [lines[i].instruction for i in blk]
        ok = eligible_families(instrs)
        if cycle is not None:
            if not set(cycle) <= set(ok) or set(cycle.values()) != set(cycle):
                continue
            rho = dict(cycle)
        else:
            if len(ok) < 3:
                continue
            a, b, c = rng.sample(ok, 3)
            rho = {a: b, b: c, c: a}
        used = [i for i in blk if _touches(lines[i].instruction, rho)]
        region = [i for i in blk if i <= used[-1]] if used else []
        if len(region) < cfg.region_min_len:
            continue
        plans[blk[0]] = (region[-1], rho)

    rw = Rewriter(p, Technique.REGISTER_SUB)
    active = None
    for i, line in enumerate(lines):
        if i in plans:
            active = plans[i]
            for a, b in xchg_sequence(active[1]):
                ins = Instruction("xchg", (reg64(a), reg64(b)))
                rw.emit(synth(ins, rw.fresh_uid()), None, ChangeKind.INSERTED, str(ins))
        if active and line.is_instruction and _touches(line.instruction, active[1]):
            new = rename(line.instruction, active[1])
            rw.emit(synth(new, line.uid), i, ChangeKind.RENAMED, f"{line.instruction} -> {new}")
        else:
            rw.keep(line, i)
        if active and i == active[0]:
            for a, b in reversed(xchg_sequence(active[1])):
                ins = Instruction("xchg", (reg64(a), reg64(b)))
                rw.emit(synth(ins, rw.fresh_uid()), None, ChangeKind.INSERTED, str(ins))
            active = None
    return rw.finish()
