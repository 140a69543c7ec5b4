"""x86-64 general-purpose register file and sub-register aliasing."""

from __future__ import annotations

from dataclasses import dataclass

# enumeration order used for deterministic tie-breaks
FAMILIES = (
    "rax", "rbx", "rcx", "rdx", "rsi", "rdi", "rbp", "rsp",
    "r8", "r9", "r10", "r11", "r12", "r13", "r14", "r15",
)
FAMILY_INDEX = {f: i for i, f in enumerate(FAMILIES)}
WIDTHS = (8, 16, 32, 64)


@dataclass(frozen=True)
class Register:
    name: str
    family: str
    width: int
    high: bool = False  # ah/bh/ch/dh: bits 8..15 of the family

    @property
    def index(self) -> int:
        return FAMILY_INDEX[self.family]

    @property
    def offset(self) -> int:
        return 8 if self.high else 0


def _build():
    table = {}

    def add(name, family, width, high=False):
        assert name not in table, name
        table[name] = Register(name, family, width, high)

    for letter in "abcd":
        fam = f"r{letter}x"
        add(fam, fam, 64)
        add(f"e{letter}x", fam, 32)
        add(f"{letter}x", fam, 16)
        add(f"{letter}l", fam, 8)
        add(f"{letter}h", fam, 8, high=True)
    for base in ("si", "di", "bp", "sp"):
        fam = f"r{base}"
        add(fam, fam, 64)
        add(f"e{base}", fam, 32)
        add(base, fam, 16)
        add(f"{base}l", fam, 8)
    for n in range(8, 16):
        fam = f"r{n}"
        add(fam, fam, 64)
        add(f"r{n}d", fam, 32)
        add(f"r{n}w", fam, 16)
        add(f"r{n}b", fam, 8)
    return table


REGISTERS: dict[str, Register] = _build()
_BY_SHAPE = {(r.family, r.width, r.high): r for r in REGISTERS.values()}
SEGMENTS = ("cs", "ds", "es", "fs", "gs", "ss")


def lookup(name: str) -> Register | None:
    return REGISTERS.get(name.lower())


def register_for(family: str, width: int, high: bool = False) -> Register:
    """The register naming ``width`` bits of ``family``."""
    try:
        return _BY_SHAPE[(family, width, high)]
    except KeyError:
        raise ValueError(f"no {width}-bit{' high' if high else ''} register in family {family}") from None


def full(family: str) -> Register:
    return _BY_SHAPE[(family, 64, False)]
