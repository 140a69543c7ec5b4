"""Textual x86-64 listing model, parser and emitter."""

from .model import (
    INDENT,
    MNEMONICS,
    Imm,
    Instruction,
    LabelRef,
    Line,
    LineKind,
    Mem,
    Operand,
    Program,
    Reg,
    format_number,
    instruction_line_count,
    synth,
)
from .parser import AsmParseError, emit_listing, parse_instruction, parse_listing, parse_operand
from .registers import FAMILIES, REGISTERS, Register, full, lookup, register_for

__all__ = [
    "AsmParseError", "FAMILIES", "INDENT", "Imm", "Instruction", "LabelRef", "Line",
    "LineKind", "MNEMONICS", "Mem", "Operand", "Program", "REGISTERS", "Reg", "Register",
    "emit_listing", "format_number", "full", "instruction_line_count", "lookup",
    "parse_instruction", "parse_listing", "parse_operand", "register_for", "synth",
]
