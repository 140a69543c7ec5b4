"""Benign synthetic listings: random straight-line code in the supported subset."""

from __future__ import annotations

from ..rng import SplitMix64
from .model import format_number
from .parser import parse_listing
from .registers import register_for

POOL = ("rax", "rbx", "rcx", "rdx", "rsi", "rdi", "r8", "r9", "r10", "r11", "r12", "r13", "r14", "r15")


def _imm(rng: SplitMix64) -> str:
    kind = rng.randint(0, 3)
    if kind == 0:
        return str(rng.randint(0, 255))
    if kind == 1:
        return format_number(rng.randint(0, 0xFFFF), 16)
    return format_number(rng.next() >> rng.randint(1, 40), 16)


def _line(rng: SplitMix64) -> str:
    r = lambda: rng.choice(POOL)  # noqa: E731
    kind = rng.randint(0, 19)
    if kind == 0:
        return f"mov {r()}, 0"
    if kind == 1:
        return f"mov {r()}, {_imm(rng)}"
    if kind == 2:
        return f"mov {r()}, {r()}"
    if kind == 3:
        return f"{rng.choice(('add', 'sub', 'xor', 'and', 'or'))} {r()}, {r()}"
    if kind == 4:
        return f"{rng.choice(('add', 'sub', 'xor', 'and', 'or'))} {r()}, {_imm(rng)}"
    if kind == 5:
        return f"{rng.choice(('add', 'sub'))} {r()}, 1"
    if kind == 6:
        return f"{rng.choice(('inc', 'dec'))} {r()}"
    if kind in (7, 8):
        return f"push {r()}" if rng.randint(0, 3) else f"push {_imm(rng)}"
    if kind == 9:
        return f"pop {r()}"
    if kind == 10:
        reg = r()
        return f"test {reg}, {reg}"
    if kind == 11:
        return f"cmp {r()}, {_imm(rng)}"
    if kind == 12:
        return f"lea {r()}, [{r()}+{rng.choice((1, 2, 4, 8))}*{r()}+{_imm(rng)}]"
    if kind == 13:
        return f"xchg {r()}, {r()}"
    if kind == 14:
        return "nop"
    if kind == 15:
        fam = r()
        return f"mov {register_for(fam, 32).name}, {format_number(rng.next() >> 32, 16)}"
    if kind == 16:
        fam = r()
        return f"add {register_for(fam, 32).name}, {register_for(r(), 32).name}"
    if kind == 17:
        return f"mov {register_for(rng.choice(POOL[:4]), 8).name}, {rng.randint(0, 255)}"
    if kind == 18:
        return f"mov {r()}, {r()}"
    reg = r()
    return f"sub {reg}, {reg}"


def generate_listing(seed: int, n_instructions: int, name: str = "sample") -> str:
    """Listing text with exactly ``n_instructions`` instruction lines."""
    rng = SplitMix64(seed)
    out = [".section '.text' rwx", ".entrypoint", "", f"// generated {name}", "entrypoint_0:"]
    offset = 0
    for _ in range(n_instructions):
        text = "    " + _line(rng)
        if rng.randint(0, 1):
            text = f"{text:<40}; @{format_number(offset, 16)}"
        offset += rng.randint(1, 10)
        out.append(text)
    out.append("db 0bbh, 0f0h, 0b5h ; @" + format_number(offset, 16))
    return "\n".join(out) + "\n"


def generate_program(seed: int, n_instructions: int, name: str = "sample"):
    return parse_listing(generate_listing(seed, n_instructions, name), name)
