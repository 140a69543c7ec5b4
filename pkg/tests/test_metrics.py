from datetime import datetime
from statistics import fmean

import pytest
from hypothesis import given, strategies as st

from published import COLUMNS, constants_table, hashlist_text, report_lines, well_formed_hashlist
from obfusclab.asm import emit_listing
from obfusclab.asm.generate import generate_program
from obfusclab.ctph import HashListError, emit_hashlist, fuzzy_compare, fuzzy_hash, parse_hashlist, sha1_digest
from obfusclab.metrics import (
    REPORT_RE,
    ChangeConstantRecord,
    SimilarityRecord,
    UndefinedInput,
    aggregate,
    build_similarity_matrix,
    change_constant,
    constants_table_csv,
    crosscheck_hashes,
    format_report,
    format_report_line,
    group_of,
    missing_payloads,
    parse_detection_db,
    parse_report,
    parse_report_line,
    records_csv,
    similarity_from_constant,
    reference_records,
)
from obfusclab.metrics.crosscheck import RESULT_RE
from obfusclab.transforms import Technique, TransformConfig, apply

WHEN = datetime(2019, 7, 3, 14, 5, 9)


# -- the constant ----------------------------------------------------------------

@pytest.mark.parametrize("s,n,c", [(55, 20, 0.0225), (61, 29, 0.013448276), (100, 1, 0.0), (100, 77, 0.0),
                                   (0, 1, 1.0)])
def test_change_constant_examples(s, n, c):
    assert change_constant(s, n) == pytest.approx(c, abs=1e-9)


def test_change_constant_rejects_zero_changes():
    with pytest.raises(UndefinedInput):
        change_constant(50, 0)
    with pytest.raises(UndefinedInput):
        similarity_from_constant(0.01, 0)


@pytest.mark.parametrize("s", [-1, 100.5])
def test_change_constant_rejects_bad_similarity(s):
    with pytest.raises(ValueError):
        change_constant(s, 3)


def test_inverse_examples():
    assert similarity_from_constant(0.0225, 20) == 55
    assert similarity_from_constant(0, 13) == 100
    with pytest.raises(ValueError):
        similarity_from_constant(0.02, 60)


def test_round_trip_grid():
    bad = [(s, n) for s in range(101) for n in range(1, 501)
           if similarity_from_constant(change_constant(s, n), n) != s]
    assert bad == []


@given(st.integers(1, 500), st.integers(0, 99))
def test_monotone(n, s):
    assert change_constant(s, n) > change_constant(s + 1, n)
    assert change_constant(s, n) > change_constant(s, n + 1)


# -- records and aggregation --------------------------------------------------------

@pytest.mark.parametrize("name,group", [
    ("Shell/Bind_tcp", "Shell"), ("VncInject64/Reverse_http", "VncInject"), ("Exec", "Single"),
    ("Meterpreter/Reverse_tcp", "Meterpreter"),
])
def test_group_of(name, group):
    assert group_of(name) == group


def test_record_without_changes_has_no_constant():
    r = ChangeConstantRecord("x", Technique.DEAD_CODE, 10, 0, 100)
    assert r.constant is None
    assert aggregate([r]).group_means == {}


def test_aggregate_empty():
    rep = aggregate([])
    assert rep.group_means == {} and rep.total_means == {}


def test_aggregate_single_record():
    r = ChangeConstantRecord("Shell/Reverse_tcp", Technique.DEAD_CODE, 103, 20, 55)
    rep = aggregate([r])
    assert rep.group_means == {"Shell": {Technique.DEAD_CODE: r.constant}}
    assert rep.total_means[Technique.DEAD_CODE] == rep.pooled_means[Technique.DEAD_CODE] == r.constant
    assert rep.similarity_means[Technique.DEAD_CODE] == 55


def test_aggregate_of_equal_constants():
    recs = [ChangeConstantRecord(f"Shell/p{i}", Technique.MIXED, 50, 10 * (i + 1), 100 - 10 * (i + 1))
            for i in range(5)]
    assert aggregate(recs).total_means[Technique.MIXED] == pytest.approx(0.01, abs=1e-15)


def test_missing_payloads_are_not_zero_records():
    missing = missing_payloads()
    assert len(missing) == 5 and all(m.startswith("Meterpreter_") for m in missing)
    recs = reference_records()
    assert not {r.payload for r in recs} & set(missing)
    assert len(recs) == 32 * 4


def test_reference_cells_match_published_table():
    cells, _, _, _ = constants_table()
    ours = {(r.payload, r.technique): r.constant for r in reference_records()}
    checked = 0
    for payload, row in cells.items():
        for t, value in row.items():
            if value is None:
                assert (payload, t) not in ours
            else:
                assert ours[(payload, t)] == pytest.approx(value, abs=1e-9)
                checked += 1
    assert checked == 32 * 4


def test_reference_aggregate_rows():
    _, groups, total, no_exec = constants_table()
    rep = aggregate(reference_records())
    for g, published in zip(("Meterpreter", "Shell", "VncInject", "Single"), groups):
        for t in COLUMNS.values():
            assert rep.group_means[g][t] == pytest.approx(published[t], abs=1e-9)
    for t in COLUMNS.values():
        assert rep.total_means[t] == pytest.approx(total[t], abs=1e-9)
    filtered = aggregate(reference_records(), exclude={"Exec"})
    for t in COLUMNS.values():
        assert filtered.total_means[t] == pytest.approx(no_exec[t], abs=1e-9)


def test_mixed_similarity_mean():
    rep = aggregate(reference_records())
    assert rep.similarity_means[Technique.MIXED] == 52.3125
    mix = [r.similarity for r in reference_records() if r.technique is Technique.MIXED]
    assert len(mix) == 32 and fmean(mix) == 52.3125


def test_exclude_drops_payload():
    recs = reference_records()
    rep = aggregate(recs, exclude={"Exec"})
    assert rep.counts[Technique.DEAD_CODE] == 31
    single = [r.constant for r in recs if r.group == "Single" and r.payload != "Exec"
              and r.technique is Technique.DEAD_CODE]
    assert rep.group_means["Single"][Technique.DEAD_CODE] == pytest.approx(fmean(single))


def test_csv_exports():
    recs = reference_records()
    rows = records_csv(recs).splitlines()
    assert rows[0] == "payload,group,technique,lines,changes,similarity,constant"
    assert len(rows) == 1 + len(recs)
    table = constants_table_csv(recs).splitlines()
    assert table[0] == "payload,DeadCode,InstrReplace,RegisterSub,Mixed"
    assert table[-2].startswith("mean:total,") and table[-1].startswith("mean:pooled,")
    assert sum(r.startswith("mean:") for r in table) == 4 + 2


# -- report grammar ---------------------------------------------------------------

def test_reference_report_lines_parse():
    lines = report_lines()
    assert len(lines) == 119
    recs = [parse_report_line(ln) for ln in lines]
    for ln, rec in zip(lines, recs):
        assert format_report_line(rec, "exe", "exe", compat=True) == ln


@pytest.mark.parametrize("line", [
    "exe//exec.exe matches exe//exec_ins.exe (101)",
    "exe//exec.exe matches exe//ll_ins.exe (50)",
    "exe//exec.exe matches exe//exec_foo.exe (50)",
    "exe//exec.exe  matches exe//exec_ins.exe (50)",
    "exe//exec.exe matches exe/exec_ins.exe (50)",
])
def test_bad_report_lines(line):
    with pytest.raises(ValueError):
        parse_report_line(line)


def test_report_round_trip():
    recs = [SimilarityRecord("s", f"s_{t.suffix}", t, 40 + i) for i, t in enumerate(Technique)]
    text = format_report(recs)
    assert all(REPORT_RE.match(ln) for ln in text.splitlines())
    assert text.splitlines()[0] == "corpus/s.asm matches corpus/s_dead.asm (40)"
    assert parse_report(text) == recs


def test_similarity_matrix():
    corpus = {}
    for i in range(3):
        p = generate_program(i, 120)
        files = {"control": emit_listing(p).encode()}
        for t in Technique:
            files[t] = emit_listing(apply(t, p, TransformConfig(seed=i)).program).encode()
        corpus[f"s{i}"] = files
    corpus["orphan"] = {Technique.DEAD_CODE: b"x"}
    errors = []
    recs = build_similarity_matrix(corpus, errors)
    assert errors == ["orphan: missing control"]
    assert len(recs) == 12
    assert [r.technique for r in recs[:4]] == list(Technique)
    for r in recs:
        files = corpus[r.base_name]
        assert r.score == fuzzy_compare(fuzzy_hash(files["control"]), fuzzy_hash(files[r.technique]))


# -- crosscheck -------------------------------------------------------------------

def test_reference_hashlist_malformed_lines():
    with pytest.raises(HashListError) as exc:
        parse_hashlist(hashlist_text())
    good, bad = well_formed_hashlist()
    assert exc.value.lineno == bad[0]
    assert bad == [31, 73, 78, 88, 91, 103, 113, 132, 137, 152]
    assert emit_hashlist(parse_hashlist(good)) == good


def test_crosscheck_empty_db():
    good, _ = well_formed_hashlist()
    assert crosscheck_hashes(good, {}, WHEN) == ""


def test_crosscheck_ratio_line():
    d = sha1_digest(b"sample")
    db = parse_detection_db(f"{d}:35-57:https://example.invalid/r/{d}\n")
    out = crosscheck_hashes(f"{d}:sample\n", db, WHEN)
    assert out == f"{d}, sample, 35-57 2019-03-07 14:05:09, https://example.invalid/r/{d}\n"
    assert RESULT_RE.match(out.rstrip("\n"))
    iso = crosscheck_hashes(f"{d}:sample\n", db, WHEN, iso=True)
    assert "2019-07-03 14:05:09" in iso


def test_crosscheck_only_comparison_sample_detected():
    good, _ = well_formed_hashlist()
    recs = parse_hashlist(good)
    rev = next(r for r in recs if r.name == "rev")
    db = parse_detection_db(f"{rev.digest}:44-68:link\n")
    out = crosscheck_hashes(recs, db, WHEN).splitlines()
    assert len(out) == 1 and out[0].startswith(f"{rev.digest}, rev, 44-68 ")


@pytest.mark.parametrize("line", ["abc:1-2:x", "a" * 40 + ":3-2:x", "a" * 40 + ":1:x"])
def test_detection_db_errors(line):
    with pytest.raises(HashListError):
        parse_detection_db("\n" + line + "\n")
