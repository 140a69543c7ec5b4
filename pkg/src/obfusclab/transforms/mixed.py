"""All three techniques chained, with per-line change counting."""

from __future__ import annotations

from ..asm.model import Program
from .base import Rewriter, Technique, TransformConfig, TransformResult
from .dead_code import insert_dead_code
from .regsub import substitute_registers
from .replace import replace_instructions

STAGES = (replace_instructions, substitute_registers, insert_dead_code)


def apply_mixed(p: Program, cfg: TransformConfig) -> TransformResult:
    """Replace, then substitute registers, then insert dead code.

    Marks from earlier stages follow their lines through later stages; the
    change count is the number of distinct source lines or inserted lines
    carrying any mark.
    """
    marks: dict[int, list] = {}
    current = p
    for stage in STAGES:
        res = stage(current, cfg)
        carried = {}
        for out_i, src in enumerate(res.origin):
            if src is not None and src in marks:
                carried[out_i] = list(marks[src])
        for e in res.log.entries:
            carried.setdefault(e.line - 1, []).append((e.kind, e.technique, e.detail))
        marks, current = carried, res.program
    rw = Rewriter(p, Technique.MIXED)
    rw.lines = list(current.lines)
    rw.origin = [None] * len(rw.lines)
    return rw.finish(marks)
