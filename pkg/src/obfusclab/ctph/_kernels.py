"""Hot loops for CTPH: rolling values, per-block-size piece digests and the
weighted edit distance used by comparison.

Each kernel exists twice: a ``*_jit`` version compiled by numba and a
``*_np`` version built from vectorised numpy plus a small table-driven loop.
The public wrappers at the bottom dispatch on :data:`JIT_ENABLED`.
"""

import numpy as np

from .._jit import JIT_ENABLED, njit

ROLLING_WINDOW = 7
HASH_INIT = 0x28021967
HASH_PRIME = 0x01000193
SPAMSUM_LENGTH = 64
MASK32 = 0xFFFFFFFF

INSERT_COST = 1
DELETE_COST = 1
SUBSTITUTE_COST = 3
TRANSPOSE_COST = 5


@njit
def _rolling_values_jit(data):
    n = data.shape[0]
    out = np.empty(n, np.uint32)
    window = np.zeros(7, np.int64)
    h1 = 0
    h2 = 0
    h3 = 0
    pos = 0
    for i in range(n):
        c = np.int64(data[i])
        h2 = (h2 - h1 + 7 * c) & 0xFFFFFFFF
        h1 = (h1 + c - window[pos]) & 0xFFFFFFFF
        window[pos] = c
        pos += 1
        if pos == 7:
            pos = 0
        h3 = ((h3 << 5) ^ c) & 0xFFFFFFFF
        out[i] = (h1 + h2 + h3) & 0xFFFFFFFF
    return out


def _rolling_values_np(data):
    # h1, h2 and h3 only depend on the last seven bytes, so the whole stream
    # is a fixed-width correlation.
    n = data.shape[0]
    padded = np.concatenate([np.zeros(ROLLING_WINDOW - 1, np.uint32), data.astype(np.uint32)])
    h1 = np.zeros(n, np.uint32)
    h2 = np.zeros(n, np.uint32)
    h3 = np.zeros(n, np.uint32)
    for back in range(ROLLING_WINDOW):
        seg = padded[ROLLING_WINDOW - 1 - back: ROLLING_WINDOW - 1 - back + n]
        h1 += seg
        h2 += np.uint32(ROLLING_WINDOW - back) * seg
        h3 ^= seg << np.uint32(5 * back)
    return h1 + h2 + h3


@njit
def _block_digest_jit(data, rolls, block_size):
    digest = np.full(SPAMSUM_LENGTH, -1, np.int64)
    h = HASH_INIT
    halfh = HASH_INIT
    halfdigest = -1
    dindex = 0
    for i in range(data.shape[0]):
        c = np.int64(data[i])
        h = ((h * HASH_PRIME) ^ c) & 0xFFFFFFFF
        halfh = ((halfh * HASH_PRIME) ^ c) & 0xFFFFFFFF
        if np.int64(rolls[i]) % block_size == block_size - 1:
            digest[dindex] = h & 63
            halfdigest = halfh & 63
            if dindex < SPAMSUM_LENGTH - 1:
                dindex += 1
                digest[dindex] = -1
                h = HASH_INIT
                if dindex < SPAMSUM_LENGTH // 2:
                    halfh = HASH_INIT
                    halfdigest = -1
    return digest, dindex, h & 63, halfh & 63, halfdigest


def _transition_table():
    # Only the low six bits of the multiply-xor state ever reach the output,
    # and they depend only on the low six bits of the previous state.
    table = np.empty((64, 256), np.uint8)
    for h in range(64):
        for c in range(256):
            table[h, c] = ((h * HASH_PRIME) ^ c) & 63
    return [bytes(row) for row in table]


_TABLE = None


def _fold(state, chunk):
    table = _TABLE
    for c in chunk:
        state = table[state][c]
    return state


def _block_digest_np(data, rolls, block_size):
    global _TABLE
    if _TABLE is None:
        _TABLE = _transition_table()
    raw = data.tobytes()
    init = HASH_INIT & 63
    trig = np.flatnonzero(rolls % np.uint32(block_size) == np.uint32(block_size - 1))
    n_trig = len(trig)
    full = SPAMSUM_LENGTH - 1
    half = SPAMSUM_LENGTH // 2 - 1

    digest = np.full(SPAMSUM_LENGTH, -1, np.int64)
    start = 0
    for k, t in enumerate(trig[:full]):
        digest[k] = _fold(init, raw[start:t + 1])
        start = int(t) + 1
    dindex = min(n_trig, full)
    if n_trig > full:
        last = int(trig[-1]) + 1
        slot = _fold(init, raw[start:last])
        digest[full] = slot
        h = _fold(slot, raw[last:])
    else:
        h = _fold(init, raw[start:])

    if n_trig > half:
        hstart = int(trig[half - 1]) + 1
        last = int(trig[-1]) + 1
        halfdigest = _fold(init, raw[hstart:last])
        halfh = _fold(halfdigest, raw[last:])
    else:
        halfdigest = -1
        halfh = h
    return digest, dindex, h, halfh, halfdigest


@njit
def _edit_distance_jit(a, b):
    la = a.shape[0]
    lb = b.shape[0]
    d = np.zeros((la + 1, lb + 1), np.int64)
    for i in range(la + 1):
        d[i, 0] = i * DELETE_COST
    for j in range(lb + 1):
        d[0, j] = j * INSERT_COST
    for i in range(1, la + 1):
        for j in range(1, lb + 1):
            cost = 0 if a[i - 1] == b[j - 1] else SUBSTITUTE_COST
            v = d[i - 1, j] + DELETE_COST
            w = d[i, j - 1] + INSERT_COST
            if w < v:
                v = w
            w = d[i - 1, j - 1] + cost
            if w < v:
                v = w
            if i > 1 and j > 1 and a[i - 1] == b[j - 2] and a[i - 2] == b[j - 1] and a[i - 1] != b[j - 1]:
                w = d[i - 2, j - 2] + TRANSPOSE_COST
                if w < v:
                    v = w
            d[i, j] = v
    return d[la, lb]


def _edit_distance_np(a, b):
    # Row-at-a-time DP; the insertion chain inside a row is a running minimum
    # of (prev + j) which np.minimum.accumulate resolves.
    la, lb = len(a), len(b)
    cols = np.arange(lb + 1, dtype=np.int64)
    prev2 = None
    prev = cols * INSERT_COST
    for i in range(1, la + 1):
        diag = prev[:-1] + np.where(b == a[i - 1], 0, SUBSTITUTE_COST)
        cand = np.empty(lb + 1, np.int64)
        cand[0] = i * DELETE_COST
        cand[1:] = np.minimum(prev[1:] + DELETE_COST, diag)
        if prev2 is not None and lb > 1:
            swap = (b[:-1] == a[i - 1]) & (b[1:] == a[i - 2]) & (b[1:] != a[i - 1])
            cand[2:] = np.where(swap, np.minimum(cand[2:], prev2[:-2] + TRANSPOSE_COST), cand[2:])
        row = np.minimum.accumulate(cand - cols * INSERT_COST) + cols * INSERT_COST
        prev2, prev = prev, row
    return int(prev[lb])


def rolling_values(data):
    """Rolling value after each byte of ``data`` (uint8 array)."""
    if JIT_ENABLED:
        return _rolling_values_jit(data)
    return _rolling_values_np(data)


def block_digest(data, rolls, block_size):
    """Piece digest state for one block size.

    Returns ``(digest, dindex, h, halfh, halfdigest)`` where ``digest`` holds
    base64 indices (``-1`` marks an unset slot), ``h``/``halfh`` are the low
    six bits of the open piece hashes and ``halfdigest`` is ``-1`` or the
    index recorded at the most recent trigger once the half digest is full.
    """
    if JIT_ENABLED:
        return _block_digest_jit(data, rolls, block_size)
    return _block_digest_np(data, rolls, block_size)


def edit_distance(a, b):
    """Weighted edit distance between two int arrays."""
    if JIT_ENABLED:
        return int(_edit_distance_jit(a, b))
    return _edit_distance_np(a, b)
