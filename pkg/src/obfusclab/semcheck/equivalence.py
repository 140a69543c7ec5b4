"""Differential execution of two instruction streams over random states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..asm.model import Program
from ..asm.registers import FAMILIES
from ..rng import splitmix64_array
from .machine import RSP, STACK_TOP, FILL_BYTE, Halt, NonUniformAddress, _Machine, execute_batch

DEFAULT_STEP_LIMIT = 1 << 20


@dataclass(frozen=True)
class EquivalenceReport:
    equal: bool
    inconclusive: bool = False
    first_divergence: tuple | None = None  # (trial, register name or stack address)
    reason: str = ""

    def __str__(self) -> str:
        if self.inconclusive:
            return f"inconclusive: {self.reason}"
        if self.equal:
            return "equal"
        trial, where = self.first_divergence
        where = f"[{where:#x}]" if isinstance(where, int) else where
        return f"diverge: trial {trial} at {where}"


def _instructions(p):
    return p.instructions() if isinstance(p, Program) else list(p)


def random_registers(trials: int, seed: int) -> list[np.ndarray]:
    """Per-family uint64 lanes: uniform values, rsp pinned to the stack top."""
    draws = splitmix64_array(seed, 16 * trials).reshape(16, trials)
    regs = [draws[i].copy() for i in range(16)]
    regs[RSP] = np.full(trials, STACK_TOP, np.uint64)
    return regs


class _Run:
    """Final state of one program, either batched or as per-trial lists."""

    def __init__(self, regs, mem, written, lowest, halted):
        self.regs, self.mem, self.written, self.lowest, self.halted = regs, mem, written, lowest, halted


def _run_batched(instrs, regs, limit):
    mach, _, halted = execute_batch(instrs, regs, limit)
    return _Run(mach.regs, mach.mem, mach.written, mach.lowest_rsp, halted)


def _run_scalar(instrs, regs, limit):
    """Fallback when lanes address memory differently: one machine per trial."""
    trials = len(regs[0])
    out_regs = [np.empty(trials, np.uint64) for _ in range(16)]
    mems, written, lowest, halted = [], set(), [], Halt.NORMALLY
    for t in range(trials):
        m = _Machine([int(r[t]) for r in regs], False, False, False, {}, batch=False)
        _, h = m.run(instrs, limit)
        if h is not Halt.NORMALLY:
            halted = h
        for i in range(16):
            out_regs[i][t] = m.regs[i]
        mems.append(m.mem)
        written |= m.written
        lowest.append(m.lowest_rsp)
    return _Run(out_regs, mems, written, lowest, halted)


def _memory_lane(run: _Run, addr: int, trials: int) -> np.ndarray:
    if isinstance(run.mem, list):
        return np.array([m.get(addr, FILL_BYTE) for m in run.mem], np.uint64)
    v = run.mem.get(addr, FILL_BYTE)
    return np.broadcast_to(np.asarray(v, np.uint64), (trials,))


def _scratch(a: _Run, b: _Run):
    """Address range [low, rsp) that lies below the final stack pointer.

    Bytes there were pushed and popped again; they are no longer part of the
    live stack, so neither program's observable state includes them.
    """
    final = a.regs[RSP]
    if not np.all(final == final[0]):
        return 0, 0
    lows = []
    for run in (a, b):
        lows.extend(run.lowest if isinstance(run.lowest, list) else [run.lowest])
    return min(lows), int(final[0])


def equivalent(a, b, trials: int = 100, seed: int = 0, step_limit: int = DEFAULT_STEP_LIMIT) -> EquivalenceReport:
    """Compare ``a`` and ``b`` on ``trials`` seeded random initial states.

    Observed: all 16 registers (rsp included) and stack bytes written by
    either program above the final rsp.  Flags are never observed.
    """
    ia, ib = _instructions(a), _instructions(b)
    regs = random_registers(trials, seed)
    try:
        ra, rb = _run_batched(ia, regs, step_limit), _run_batched(ib, regs, step_limit)
    except NonUniformAddress:
        ra, rb = _run_scalar(ia, regs, step_limit), _run_scalar(ib, regs, step_limit)
    for run, label in ((ra, "first"), (rb, "second")):
        if run.halted is not Halt.NORMALLY:
            return EquivalenceReport(False, True, None, f"{label} program halted: {run.halted.value}")

    first = None
    for i, fam in enumerate(FAMILIES):
        bad = np.flatnonzero(ra.regs[i] != rb.regs[i])
        if bad.size and (first is None or bad[0] < first[0]):
            first = (int(bad[0]), fam)
    low, high = _scratch(ra, rb)
    for addr in sorted(ra.written | rb.written):
        if low <= addr < high:
            continue
        bad = np.flatnonzero(_memory_lane(ra, addr, trials) != _memory_lane(rb, addr, trials))
        if bad.size and (first is None or bad[0] < first[0]):
            first = (int(bad[0]), addr)
    if first is None:
        return EquivalenceReport(True)
    return EquivalenceReport(False, False, first)
