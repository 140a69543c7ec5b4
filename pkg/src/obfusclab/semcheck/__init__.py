"""Straight-line x86-64 evaluation and differential equivalence checking."""

from .equivalence import EquivalenceReport, equivalent, random_registers
from .machine import EVALUABLE, STACK_TOP, ExecutionOutcome, Halt, MachineState, execute_block

__all__ = ["EVALUABLE", "EquivalenceReport", "ExecutionOutcome", "Halt", "MachineState",
           "STACK_TOP", "equivalent", "execute_block", "random_registers"]
