"""Periodic insertion of instructions with no observable effect."""

from __future__ import annotations

from ..asm.model import BRANCHES, Imm, Instruction, LineKind, Mem, Program, synth
from ..asm.registers import FAMILIES, FAMILY_INDEX
from ..rng import SplitMix64
from .analysis import explicit_registers, flags_dead_after, reg64, used_families, written_families
from .base import ChangeKind, Rewriter, Technique, TransformConfig, TransformResult

ZERO = Imm(0, 10, "0")
# mov r, r is flag-neutral; the others need dead flags
_FLAGGED = ("add", "sub", "or")


def insertion_points(n_instr: int, cfg: TransformConfig, rng: SplitMix64) -> list[int]:
    """Instruction ordinals (1-based) after which an item is inserted."""
    points, pos = [], 0
    while True:
        pos += rng.randint(cfg.insertion_period_min, cfg.insertion_period_max)
        if pos > n_instr:
            return points
        points.append(pos)


def _by_order(fams) -> list[str]:
    return sorted((f for f in fams if f != "rsp"), key=FAMILY_INDEX.__getitem__)


def _pick_register(prev: Instruction, nxt: Instruction | None) -> str | None:
    written = _by_order(written_families(prev))
    if written:
        return written[0]
    near = {r.family for r in explicit_registers(prev)}
    if nxt is not None:
        near |= {r.family for r in explicit_registers(nxt)}
    near = _by_order(near)
    return near[0] if near else None


def _segment_allows_pair(lines, start: int, stop: int) -> str | None:
    """Register a push/pop pair may wrap around ``lines[start:stop]``, if any.

    The segment must be straight-line code that leaves rsp and the stack
    alone; the chosen register must not be written inside it.
    """
    written = set()
    for line in lines[start:stop]:
        if line.kind in (LineKind.COMMENT, LineKind.BLANK):
            continue
        if line.kind is not LineKind.INSTRUCTION:
            return None
        ins = line.instruction
        if ins.mnemonic in BRANCHES or "rsp" in used_families(ins):
            return None
        if any(isinstance(op, Mem) for op in ins.operands):
            return None
        written.update(written_families(ins))
        if ins.mnemonic in ("lodsb", "pushad", "popad"):
            return None
    free = [f for f in FAMILIES if f not in written and f != "rsp"]
    return free[0] if free else None


def insert_dead_code(p: Program, cfg: TransformConfig) -> TransformResult:
    """Insert one dead item after every k-th instruction line, k seeded in the period range."""
    rng = SplitMix64(cfg.seed)
    lines = list(p.lines)
    instr_at = [i for i, ln in enumerate(lines) if ln.is_instruction]
    points = insertion_points(len(instr_at), cfg, rng)
    after = [instr_at[k - 1] for k in points]

    items: dict[int, Instruction] = {}
    pending_pop = None
    for j, a in enumerate(after):
        if pending_pop is not None:
            items[a] = Instruction("pop", (reg64(pending_pop),))
            pending_pop = None
            continue
        prev = lines[a].instruction
        nxt_i = next((i for i in instr_at if i > a), None)
        fam = _pick_register(prev, lines[nxt_i].instruction if nxt_i is not None else None)
        if fam is not None:
            r = reg64(fam)
            if flags_dead_after(lines, a):
                m = rng.choice(("mov",) + _FLAGGED)
            else:
                m = "mov"
            items[a] = Instruction(m, (r, r) if m == "mov" else (r, ZERO))
            continue
        pair = _segment_allows_pair(lines, a + 1, after[j + 1] + 1) if j + 1 < len(after) else None
        if pair is not None:
            items[a] = Instruction("push", (reg64(pair),))
            pending_pop = pair
        else:
            items[a] = Instruction("nop")

    rw = Rewriter(p, Technique.DEAD_CODE)
    for i, line in enumerate(lines):
        rw.keep(line, i)
        if i in items:
            rw.emit(synth(items[i], rw.fresh_uid()), None, ChangeKind.INSERTED, str(items[i]))
    return rw.finish()
