"""Obfuscating rewrites over parsed listings."""

from .base import (
    ChangeEntry,
    ChangeKind,
    ChangeLog,
    ChangeLogMismatch,
    Technique,
    TransformConfig,
    TransformResult,
    count_changes,
)
from .dead_code import insert_dead_code
from .mixed import apply_mixed
from .regsub import substitute_registers, xchg_sequence
from .replace import replace_instructions

TECHNIQUES = {
    Technique.DEAD_CODE: insert_dead_code,
    Technique.REGISTER_SUB: substitute_registers,
    Technique.INSTR_REPLACE: replace_instructions,
    Technique.MIXED: apply_mixed,
}


def apply(technique: Technique, program, cfg: TransformConfig) -> TransformResult:
    return TECHNIQUES[technique](program, cfg)


__all__ = ["TECHNIQUES", "ChangeEntry", "ChangeKind", "ChangeLog", "ChangeLogMismatch", "Technique",
           "TransformConfig", "TransformResult", "apply", "apply_mixed", "count_changes",
           "insert_dead_code", "replace_instructions", "substitute_registers", "xchg_sequence"]
