"""A small x86-64 evaluator for straight-line code.

Only the data-movement and ALU subset is modelled (``mov add sub xor and or
inc dec push pop xchg lea nop test cmp``).  Register values are either
Python ints (one machine) or ``uint64`` arrays holding one lane per trial;
the same code runs both, which is how :mod:`.equivalence` evaluates many
random initial states per instruction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..asm.model import BRANCHES, SIZE_BITS, Imm, Instruction, LabelRef, Mem, Reg
from ..asm.registers import FAMILIES, FAMILY_INDEX, Register, lookup

MASK64 = (1 << 64) - 1
STACK_TOP = 1 << 32
FILL_BYTE = 0
RSP = FAMILY_INDEX["rsp"]

EVALUABLE = frozenset({"mov", "add", "sub", "xor", "and", "or", "inc", "dec",
                       "push", "pop", "xchg", "lea", "nop", "test", "cmp"})


class Halt(str, Enum):
    NORMALLY = "normally"
    STEP_LIMIT = "step-limit"
    UNSUPPORTED = "unsupported-instruction"


class Unsupported(Exception):
    pass


class NonUniformAddress(Exception):
    """Lanes of a batched run disagree on a memory address."""


def _mask(width: int) -> int:
    return (1 << width) - 1


@dataclass
class MachineState:
    regs: list = field(default_factory=lambda: [0] * 16)
    zf: bool = False
    sf: bool = False
    cf: bool = False
    stack: dict = field(default_factory=dict)  # address -> byte

    def copy(self) -> "MachineState":
        return MachineState(list(self.regs), self.zf, self.sf, self.cf, dict(self.stack))

    def reg(self, name: str) -> int:
        r = lookup(name)
        return (self.regs[r.index] >> r.offset) & _mask(r.width)

    def set_reg(self, name: str, value: int) -> None:
        _write_reg(self.regs, lookup(name), value)

    def load(self, address: int, size: int = 8) -> int:
        return sum(self.stack.get(address + i, FILL_BYTE) << (8 * i) for i in range(size))

    @classmethod
    def initial(cls, **regs) -> "MachineState":
        st = cls()
        st.regs[RSP] = STACK_TOP
        for name, value in regs.items():
            st.set_reg(name, value)
        return st


@dataclass
class ExecutionOutcome:
    final: MachineState
    steps: int
    halted: Halt
    written: frozenset = frozenset()
    lowest_rsp: int = STACK_TOP


def _write_reg(regs, reg: Register, value) -> None:
    i = reg.index
    if reg.width == 64:
        regs[i] = value & MASK64
    elif reg.width == 32:
        # 32-bit writes zero the upper half
        regs[i] = value & 0xFFFFFFFF
    else:
        m = _mask(reg.width) << reg.offset
        regs[i] = (regs[i] & (MASK64 ^ m)) | ((value & _mask(reg.width)) << reg.offset)


class _Machine:
    """Interpreter core shared by scalar and batched execution."""

    def __init__(self, regs, zf, sf, cf, mem, batch: bool):
        self.regs = regs
        self.zf, self.sf, self.cf = zf, sf, cf
        self.mem = mem
        self.batch = batch
        self.lanes = regs[0].shape if batch else None
        self.written = set()
        self.lowest_rsp = self._addr(regs[RSP])

    def _addr(self, value) -> int:
        if not self.batch:
            return int(value) & MASK64
        first = value[0]
        if not np.all(value == first):
            raise NonUniformAddress
        return int(first)

    def _const(self, value: int):
        return np.full(self.lanes, value, np.uint64) if self.batch else value

    def _zero(self):
        return self._const(0)

    # -- operand access -------------------------------------------------

    def width_of(self, op, other=None) -> int:
        if isinstance(op, Reg):
            return op.reg.width
        if isinstance(op, Mem):
            if op.size:
                return SIZE_BITS[op.size]
            if isinstance(other, Reg):
                return other.reg.width
            raise Unsupported("memory operand without size")
        raise Unsupported("no width")

    def address(self, m: Mem):
        a = self._const(m.disp & MASK64)
        if m.base is not None:
            a = a + self.read_reg(m.base)
        if m.index is not None:
            a = a + self.read_reg(m.index) * m.scale
        return a & MASK64

    def read_reg(self, r: Register):
        v = self.regs[r.index]
        if r.width == 64:
            return v
        return (v >> r.offset) & _mask(r.width)

    def load(self, address: int, width: int):
        v = self._zero()
        for i in range(width // 8):
            byte = self.mem.get((address + i) & MASK64, FILL_BYTE)
            v = v | (byte << (8 * i))
        return v

    def store(self, address: int, width: int, value) -> None:
        for i in range(width // 8):
            a = (address + i) & MASK64
            self.mem[a] = (value >> (8 * i)) & 0xFF
            self.written.add(a)

    def read(self, op, width: int):
        if isinstance(op, Reg):
            return self.read_reg(op.reg)
        if isinstance(op, Imm):
            return self._const(op.value & _mask(width))
        if isinstance(op, Mem):
            return self.load(self._addr(self.address(op)), width)
        raise Unsupported(f"cannot read {op}")

    def write(self, op, width: int, value) -> None:
        if isinstance(op, Reg):
            _write_reg(self.regs, op.reg, value)
        elif isinstance(op, Mem):
            self.store(self._addr(self.address(op)), width, value & _mask(width))
        else:
            raise Unsupported(f"cannot write {op}")

    def set_flags(self, result, width: int, cf) -> None:
        self.zf = result == 0
        self.sf = ((result >> (width - 1)) & 1) == 1
        self.cf = cf

    def _false(self):
        return np.zeros(self.lanes, bool) if self.batch else False

    # -- execution ------------------------------------------------------

    def step(self, ins: Instruction) -> None:
        m, ops = ins.mnemonic, ins.operands
        if m == "nop":
            return
        if m in ("push", "pop"):
            return self._stack_op(m, ops[0])
        if m == "lea":
            if ops[1].segment:
                raise Unsupported("segment in lea")
            _write_reg(self.regs, ops[0].reg, self.address(ops[1]))
            return
        if m in ("inc", "dec"):
            w = self.width_of(ops[0])
            a = self.read(ops[0], w)
            r = (a + 1 if m == "inc" else a - 1) & _mask(w)
            self.write(ops[0], w, r)
            self.set_flags(r, w, self.cf)
            return
        dst, src = ops
        w = self.width_of(dst, src)
        if isinstance(src, Reg) and isinstance(dst, (Reg, Mem)) and src.reg.width != w:
            raise Unsupported("operand width mismatch")
        if m == "xchg":
            a, b = self.read(dst, w), self.read(src, w)
            self.write(dst, w, b)
            self.write(src, w, a)
            return
        b = self.read(src, w)
        if m == "mov":
            self.write(dst, w, b)
            return
        a = self.read(dst, w)
        mask = _mask(w)
        if m in ("add",):
            r = (a + b) & mask
            cf = r < a
        elif m in ("sub", "cmp"):
            r = (a - b) & mask
            cf = a < b
        elif m in ("and", "test"):
            r, cf = a & b, self._false()
        elif m == "or":
            r, cf = a | b, self._false()
        elif m == "xor":
            r, cf = a ^ b, self._false()
        else:
            raise Unsupported(m)
        if m not in ("cmp", "test"):
            self.write(dst, w, r)
        self.set_flags(r, w, cf)

    def _stack_op(self, m: str, op) -> None:
        if isinstance(op, Reg) and op.reg.width != 64:
            raise Unsupported("only 64-bit push/pop")
        if isinstance(op, Mem) and op.size not in (None, "qword"):
            raise Unsupported("only qword push/pop")
        if m == "push":
            value = self.read(op, 64)
            rsp = (self.regs[RSP] - 8) & MASK64
            self.regs[RSP] = rsp
            addr = self._addr(rsp)
            self.lowest_rsp = min(self.lowest_rsp, addr)
            self.store(addr, 64, value)
        else:
            addr = self._addr(self.regs[RSP])
            value = self.load(addr, 64)
            self.regs[RSP] = (self.regs[RSP] + 8) & MASK64
            # pop rsp loads the popped value last
            self.write(op, 64, value)

    def run(self, instrs, step_limit: int) -> tuple[int, Halt]:
        steps = 0
        for ins in instrs:
            if ins.mnemonic in BRANCHES:
                return steps, Halt.NORMALLY
            if steps >= step_limit:
                return steps, Halt.STEP_LIMIT
            if ins.mnemonic not in EVALUABLE:
                return steps, Halt.UNSUPPORTED
            try:
                self.step(ins)
            except Unsupported:
                return steps, Halt.UNSUPPORTED
            steps += 1
        return steps, Halt.NORMALLY


def execute_block(instrs, init: MachineState, step_limit: int = 1 << 20) -> ExecutionOutcome:
    """Run ``instrs`` from ``init`` (left untouched) and return the outcome.

    Evaluation stops at the first control transfer.  Out-of-subset
    mnemonics yield an ``unsupported-instruction`` outcome rather than an
    exception.
    """
    st = init.copy()
    mach = _Machine(st.regs, st.zf, st.sf, st.cf, st.stack, batch=False)
    steps, halted = mach.run(list(instrs), step_limit)
    final = MachineState(mach.regs, bool(mach.zf), bool(mach.sf), bool(mach.cf), mach.mem)
    return ExecutionOutcome(final, steps, halted, frozenset(mach.written), mach.lowest_rsp)


def execute_batch(instrs, regs, step_limit: int = 1 << 20):
    """Run ``instrs`` on ``len(regs[0])`` lanes at once.

    ``regs`` is a list of 16 uint64 arrays.  Returns ``(machine, steps,
    halted)``; raises :class:`NonUniformAddress` if lanes would touch
    different memory addresses.
    """
    lanes = regs[0].shape
    mach = _Machine([r.copy() for r in regs], np.zeros(lanes, bool), np.zeros(lanes, bool),
                    np.zeros(lanes, bool), {}, batch=True)
    steps, halted = mach.run(list(instrs), step_limit)
    return mach, steps, halted


__all__ = ["EVALUABLE", "ExecutionOutcome", "FAMILIES", "Halt", "MachineState", "NonUniformAddress",
           "STACK_TOP", "execute_batch", "execute_block", "LabelRef"]
