"""Context triggered piecewise hashing (ssdeep-compatible).

A stream is cut into pieces wherever a 7-byte rolling hash hits
``block_size - 1`` modulo the block size; each piece contributes one base64
character taken from a multiply-xor hash of its bytes.  Two digests are kept,
one at ``block_size`` and a shorter one at ``2 * block_size`` so signatures
of files of different sizes can still be compared.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._kernels import HASH_INIT, HASH_PRIME, MASK32, ROLLING_WINDOW, SPAMSUM_LENGTH

B64 = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/"
MIN_BLOCKSIZE = 3
FILE_HEADER = "ssdeep,1.1--blocksize:hash:hash,filename"

_SIG_RE = re.compile(r'^(\d+):([A-Za-z0-9+/]*):([A-Za-z0-9+/]*)(?:,"(.*)")?$')


class SignatureFormatError(ValueError):
    pass


@dataclass
class RollingState:
    """Incremental form of the rolling hash.  Single owner, not thread-safe."""

    window: bytearray = field(default_factory=lambda: bytearray(ROLLING_WINDOW))
    h1: int = 0
    h2: int = 0
    h3: int = 0
    n: int = 0

    @property
    def value(self) -> int:
        return (self.h1 + self.h2 + self.h3) & MASK32

    def last_bytes(self) -> bytes:
        """The last ``min(n, 7)`` bytes consumed, oldest first."""
        k = min(self.n, ROLLING_WINDOW)
        pos = self.n % ROLLING_WINDOW
        ordered = self.window[pos:] + self.window[:pos]
        return bytes(ordered[ROLLING_WINDOW - k:])


def roll_update(state: RollingState, byte: int) -> int:
    """Push one byte through ``state`` and return the new rolling value."""
    pos = state.n % ROLLING_WINDOW
    state.h2 = (state.h2 - state.h1 + ROLLING_WINDOW * byte) & MASK32
    state.h1 = (state.h1 + byte - state.window[pos]) & MASK32
    state.window[pos] = byte
    state.n += 1
    state.h3 = ((state.h3 << 5) ^ byte) & MASK32
    return state.value


def piece_hash(data: bytes, h: int = HASH_INIT) -> int:
    """The full 32-bit multiply-xor piece hash (its low six bits pick a digest character)."""
    for c in data:
        h = ((h * HASH_PRIME) ^ c) & MASK32
    return h


@dataclass(frozen=True)
class FuzzySignature:
    block_size: int
    digest_primary: str
    digest_secondary: str
    source_name: str | None = None

    def __str__(self) -> str:
        return format_signature(self)

    @property
    def text(self) -> str:
        """``block_size:digest_primary:digest_secondary`` without the name."""
        return f"{self.block_size}:{self.digest_primary}:{self.digest_secondary}"


def _as_array(data) -> np.ndarray:
    if isinstance(data, np.ndarray):
        return np.ascontiguousarray(data, dtype=np.uint8)
    return np.frombuffer(bytes(data), dtype=np.uint8)


def fuzzy_hash(data, name: str | None = None) -> FuzzySignature:
    """Compute the CTPH signature of ``data`` (bytes-like or uint8 array)."""
    buf = _as_array(data)
    n = buf.shape[0]
    rolls = _kernels.rolling_values(buf)
    roll_end = int(rolls[-1]) if n else 0

    states = {}

    def state(bs):
        if bs not in states:
            states[bs] = _kernels.block_digest(buf, rolls, bs)
        return states[bs]

    block_size = MIN_BLOCKSIZE
    while block_size * SPAMSUM_LENGTH < n:
        block_size *= 2
    while block_size > MIN_BLOCKSIZE and state(block_size)[1] < SPAMSUM_LENGTH // 2:
        block_size //= 2

    digest, dindex, h, _, _ = state(block_size)
    primary = [B64[int(x)] for x in digest[:dindex]]
    if roll_end != 0:
        primary.append(B64[int(h)])
    elif digest[dindex] >= 0:
        primary.append(B64[int(digest[dindex])])

    digest2, dindex2, _, halfh2, halfdigest2 = state(block_size * 2)
    keep = min(int(dindex2), SPAMSUM_LENGTH // 2 - 1)
    secondary = [B64[int(x)] for x in digest2[:keep]]
    if roll_end != 0:
        secondary.append(B64[int(halfh2)])
    elif halfdigest2 >= 0:
        secondary.append(B64[int(halfdigest2)])

    return FuzzySignature(block_size, "".join(primary), "".join(secondary), name)


def eliminate_sequences(digest: str) -> str:
    """Collapse runs of more than three identical characters to three."""
    out = []
    for ch in digest:
        if len(out) >= 3 and out[-1] == ch and out[-2] == ch and out[-3] == ch:
            continue
        out.append(ch)
    return "".join(out)


def has_common_substring(a: str, b: str, length: int = ROLLING_WINDOW) -> bool:
    if len(a) < length or len(b) < length:
        return False
    grams = {a[i:i + length] for i in range(len(a) - length + 1)}
    return any(b[i:i + length] in grams for i in range(len(b) - length + 1))


def _codes(s: str) -> np.ndarray:
    return np.frombuffer(s.encode("ascii"), dtype=np.uint8).astype(np.int64)


def weighted_edit_distance(a: str, b: str) -> int:
    """Insert/delete 1, substitute 3, adjacent transposition 5."""
    return _kernels.edit_distance(_codes(a), _codes(b))


def score_strings(a: str, b: str, block_size: int) -> int:
    if not has_common_substring(a, b):
        return 0
    dist = weighted_edit_distance(a, b)
    score = (dist * SPAMSUM_LENGTH) // (len(a) + len(b))
    score = (100 * score) // SPAMSUM_LENGTH
    score = 100 - score
    # small block sizes cannot carry much evidence; bound the score
    if block_size >= (99 + ROLLING_WINDOW) // ROLLING_WINDOW * MIN_BLOCKSIZE:
        return score
    return min(score, block_size // MIN_BLOCKSIZE * min(len(a), len(b)))


def fuzzy_compare(a: FuzzySignature | str, b: FuzzySignature | str) -> int:
    """Similarity score in 0..100 between two signatures (100 = identical)."""
    if isinstance(a, str):
        a = parse_signature(a)
    if isinstance(b, str):
        b = parse_signature(b)
    bs1, bs2 = a.block_size, b.block_size
    if bs1 != bs2 and bs1 * 2 != bs2 and bs2 * 2 != bs1:
        return 0

    a1, a2 = eliminate_sequences(a.digest_primary), eliminate_sequences(a.digest_secondary)
    b1, b2 = eliminate_sequences(b.digest_primary), eliminate_sequences(b.digest_secondary)

    if bs1 == bs2 and a1 == b1 and a2 == b2:
        # identical but empty signatures carry no evidence of similarity
        return 100 if a1 else 0

    if bs1 == bs2:
        return max(score_strings(a1, b1, bs1), score_strings(a2, b2, bs1 * 2))
    if bs1 == bs2 * 2:
        return score_strings(a1, b2, bs1)
    return score_strings(a2, b1, bs2)


def format_signature(sig: FuzzySignature, name: str | None = None) -> str:
    """``block_size:hash:hash,"name"`` as printed by ssdeep."""
    label = name if name is not None else sig.source_name
    if label is None:
        return sig.text
    return f'{sig.text},"{label}"'


def parse_signature(line: str) -> FuzzySignature:
    m = _SIG_RE.match(line.strip())
    if not m:
        raise SignatureFormatError(f"not a fuzzy signature: {line!r}")
    bs = int(m.group(1))
    if bs < MIN_BLOCKSIZE or bs % MIN_BLOCKSIZE or (bs // MIN_BLOCKSIZE) & (bs // MIN_BLOCKSIZE - 1):
        raise SignatureFormatError(f"invalid block size {bs}")
    if len(m.group(2)) > SPAMSUM_LENGTH or len(m.group(3)) > SPAMSUM_LENGTH // 2:
        raise SignatureFormatError("digest too long")
    return FuzzySignature(bs, m.group(2), m.group(3), m.group(4))


def format_signature_file(sigs) -> str:
    lines = [FILE_HEADER]
    lines.extend(format_signature(s) for s in sigs)
    return "\n".join(lines) + "\n"


def parse_signature_file(text: str) -> list[FuzzySignature]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if lines and lines[0].startswith("ssdeep,"):
        lines = lines[1:]
    return [parse_signature(ln) for ln in lines]
