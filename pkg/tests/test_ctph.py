import hashlib
import json
import random
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import ctph_corpus
from obfusclab.ctph import (
    B64,
    FILE_HEADER,
    FuzzySignature,
    HashListError,
    RollingState,
    Sha1Record,
    eliminate_sequences,
    emit_hashlist,
    format_signature,
    format_signature_file,
    fuzzy_compare,
    fuzzy_hash,
    parse_hashlist,
    parse_signature,
    parse_signature_file,
    roll_update,
    sha1_digest,
    weighted_edit_distance,
)
from obfusclab.ctph import _kernels

GOLDEN = json.loads((Path(__file__).parent / "data" / "ctph_golden.json").read_text())


# -- rolling hash -----------------------------------------------------------

def test_roll_zero_byte_gives_zero():
    assert roll_update(RollingState(), 0) == 0


def test_roll_single_one():
    s = RollingState()
    assert roll_update(s, 1) == 9
    assert (s.h1, s.h2, s.h3) == (1, 7, 1)


def test_roll_h1_steady_on_repeated_byte():
    s = RollingState()
    for _ in range(7):
        roll_update(s, 0x41)
    h1 = s.h1
    roll_update(s, 0x41)
    assert s.h1 == h1


@given(st.binary(max_size=40))
def test_roll_window_holds_last_bytes(data):
    s = RollingState()
    for b in data:
        roll_update(s, b)
    assert s.last_bytes() == data[-7:]
    assert s.n == len(data)


@given(st.binary(max_size=30), st.binary(max_size=30), st.binary(min_size=7, max_size=7))
def test_roll_h1_h2_depend_only_on_window(p1, p2, tail):
    a, b = RollingState(), RollingState()
    for x in p1 + tail:
        roll_update(a, x)
    for x in p2 + tail:
        roll_update(b, x)
    assert (a.h1, a.h2) == (b.h1, b.h2)


@given(st.binary(max_size=300))
def test_rolling_kernels_match_incremental(data):
    s = RollingState()
    expected = [roll_update(s, b) for b in data]
    arr = np.frombuffer(data, np.uint8)
    assert _kernels._rolling_values_np(arr).tolist() == expected
    assert _kernels._rolling_values_jit(arr).tolist() == expected


# -- signatures -------------------------------------------------------------

def test_empty_input():
    sig = fuzzy_hash(b"")
    assert (sig.block_size, sig.digest_primary, sig.digest_secondary) == (3, "", "")


@given(st.binary(max_size=2000))
@settings(max_examples=50)
def test_signature_invariants(data):
    sig = fuzzy_hash(data)
    assert fuzzy_hash(data) == sig
    k = sig.block_size // 3
    assert sig.block_size % 3 == 0 and k & (k - 1) == 0
    assert len(sig.digest_primary) <= 64 and len(sig.digest_secondary) <= 32
    assert set(sig.digest_primary + sig.digest_secondary) <= set(B64)


@pytest.mark.parametrize("index", range(0, 120, 7))
def test_kernel_paths_agree(index):
    data = np.frombuffer(ctph_corpus.file_bytes(index), np.uint8)
    rolls = _kernels._rolling_values_jit(data)
    for bs in (3, 24, 192, 1536):
        jit = _kernels._block_digest_jit(data, rolls, bs)
        ref = _kernels._block_digest_np(data, rolls, bs)
        assert jit[0].tolist() == ref[0].tolist()
        assert tuple(int(x) for x in jit[1:]) == tuple(int(x) for x in ref[1:])


def test_secondary_is_double_block_size():
    data = ctph_corpus.file_bytes(5)
    sig = fuzzy_hash(data)
    # the secondary digest at bs equals the truncated primary digest computed at 2*bs
    doubled = _kernels.block_digest(np.frombuffer(data, np.uint8),
                                    _kernels.rolling_values(np.frombuffer(data, np.uint8)),
                                    sig.block_size * 2)
    prefix = "".join(B64[int(x)] for x in doubled[0][:min(int(doubled[1]), 31)])
    assert sig.digest_secondary.startswith(prefix)


@pytest.mark.parametrize("entry", GOLDEN["files"][:30], ids=lambda e: f"file{e['index']}")
def test_golden_signatures_sample(entry):
    data = ctph_corpus.file_bytes(entry["index"])
    assert len(data) == entry["size"]
    assert fuzzy_hash(data).text == entry["signature"]


# -- comparison -------------------------------------------------------------

@lru_cache(maxsize=None)
def _lcs(a, b):
    if not a or not b:
        return 0
    if a[0] == b[0]:
        return 1 + _lcs(a[1:], b[1:])
    return max(_lcs(a[1:], b), _lcs(a, b[1:]))


@given(st.text(alphabet="ABCD", max_size=12), st.text(alphabet="ABCD", max_size=12))
def test_edit_distance_is_indel_distance(a, b):
    # substitution (3) and transposition (5) never beat delete+insert (2 per
    # char), so the weighted distance collapses to len(a)+len(b)-2*LCS
    expected = len(a) + len(b) - 2 * _lcs(a, b)
    assert weighted_edit_distance(a, b) == expected
    ca = np.frombuffer(a.encode(), np.uint8).astype(np.int64)
    cb = np.frombuffer(b.encode(), np.uint8).astype(np.int64)
    assert _kernels._edit_distance_np(ca, cb) == expected
    assert _kernels._edit_distance_jit(ca, cb) == expected


def test_eliminate_sequences():
    assert eliminate_sequences("AAAAAABCCCCD") == "AAABCCCD"
    assert eliminate_sequences("AAA") == "AAA"


def test_self_compare_is_100():
    sig = fuzzy_hash(ctph_corpus.file_bytes(3))
    assert fuzzy_compare(sig, sig) == 100


def test_incompatible_block_sizes():
    a = FuzzySignature(3, "ABCDEFGHIJ", "ABCDE")
    b = FuzzySignature(24, "ABCDEFGHIJ", "ABCDE")
    assert fuzzy_compare(a, b) == 0


def test_empty_signatures_score_zero():
    e = fuzzy_hash(b"")
    assert fuzzy_compare(e, e) == 0
    assert fuzzy_compare(e, fuzzy_hash(ctph_corpus.file_bytes(0))) == 0


def test_no_common_substring_scores_zero():
    assert fuzzy_compare("96:ABCDEFGHIJKL:ABCDEF", "96:MNOPQRSTUVWX:MNOPQR") == 0


sig_strategy = st.builds(
    FuzzySignature,
    st.sampled_from([3, 6, 12, 24, 48, 96]),
    st.text(alphabet="ABCDEF", max_size=64),
    st.text(alphabet="ABCDEF", max_size=32),
)


@given(sig_strategy, sig_strategy)
def test_compare_symmetric_and_bounded(a, b):
    s = fuzzy_compare(a, b)
    assert s == fuzzy_compare(b, a)
    assert 0 <= s <= 100


@pytest.mark.parametrize("seed", range(5))
def test_self_similarity_random(seed):
    data = random.Random(seed).randbytes(4096 + seed * 1000)
    sig = fuzzy_hash(data)
    assert fuzzy_compare(sig, sig) == 100


def test_locality_single_byte_flip():
    hits = 0
    for trial in range(100):
        rng = random.Random(1000 + trial)
        data = bytearray(rng.randbytes(64 * 1024))
        base = fuzzy_hash(bytes(data))
        pos = rng.randrange(len(data))
        data[pos] ^= 1 << rng.randrange(8)
        hits += fuzzy_compare(base, fuzzy_hash(bytes(data))) > 0
    assert hits >= 99


# -- text formats -----------------------------------------------------------

def test_signature_format_round_trip():
    sig = fuzzy_hash(ctph_corpus.file_bytes(2), name="a/b.asm")
    line = format_signature(sig)
    assert line == f'{sig.block_size}:{sig.digest_primary}:{sig.digest_secondary},"a/b.asm"'
    assert parse_signature(line) == sig
    text = format_signature_file([sig])
    assert text.splitlines()[0] == FILE_HEADER
    assert parse_signature_file(text) == [sig]


@pytest.mark.parametrize("bad", ["", "5:AB:C", "3:AB", "x:AB:CD", "3:A*B:CD"])
def test_parse_signature_rejects(bad):
    with pytest.raises(ValueError):
        parse_signature(bad)


# -- SHA-1 ------------------------------------------------------------------

def test_sha1_vectors():
    assert sha1_digest(b"") == "da39a3ee5e6b4b0d3255bfef95601890afd80709"
    assert sha1_digest(b"abc") == "a9993e364706816aba3e25717850c26c9cd0d89d"
    assert sha1_digest(b"abc") == sha1_digest(b"abc")


def test_hashlist_round_trip():
    recs = [Sha1Record(sha1_digest(bytes([i])), f"s{i}_dead.asm") for i in range(5)]
    text = emit_hashlist(recs)
    assert parse_hashlist(text) == recs
    assert emit_hashlist(parse_hashlist(text)) == text


def test_hashlist_reports_line_number():
    text = (
        "6651eca7041be848db234c4b4a2cbb544328457c:rev\n"
        "97a1acac671fa02453d5alcaa969dc9751020e6e:mrev_winhttp.exe\n"
    )
    with pytest.raises(HashListError) as exc:
        parse_hashlist(text)
    assert exc.value.lineno == 2


def test_sha1_record_validates():
    with pytest.raises(ValueError):
        Sha1Record("ABC", "x")
    assert str(Sha1Record(hashlib.sha1(b"x").hexdigest(), "x")).endswith(":x")
