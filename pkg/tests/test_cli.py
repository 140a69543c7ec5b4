import hashlib
import subprocess
import sys

import pytest

from fragments import REGSWAP_ORIGINAL
from obfusclab.cli import DIFFERENT, INPUT_ERROR, OK, main
from obfusclab.ctph import fuzzy_compare, fuzzy_hash, sha1_digest
from obfusclab.metrics import parse_report


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def tree_digest(root):
    return {str(p.relative_to(root)): hashlib.sha1(p.read_bytes()).hexdigest()
            for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.fixture
def corpus(tmp_path, capsys):
    root = tmp_path / "corpus"
    assert run(capsys, "gen", "--count", 3, "--lines", "40-80", "--seed", 5, root)[0] == OK
    return root


def test_gen_layout(corpus):
    names = sorted(p.name for p in corpus.iterdir())
    assert names == ["sample_0000", "sample_0001", "sample_0002"]
    assert (corpus / "sample_0001" / "sample_0001.asm").is_file()


def test_hash_and_compare(tmp_path, capsys):
    a, b = tmp_path / "a.bin", tmp_path / "b.bin"
    a.write_bytes(bytes(range(256)) * 40)
    b.write_bytes(bytes(range(256)) * 39 + b"x" * 256)
    code, out, _ = run(capsys, "hash", a)
    assert code == OK and out.strip().endswith(f',"{a}"')
    code, out, _ = run(capsys, "compare", a, b)
    assert int(out) == fuzzy_compare(fuzzy_hash(a.read_bytes()), fuzzy_hash(b.read_bytes()))
    sig = tmp_path / "a.sig"
    sig.write_text(run(capsys, "hash", a)[1].strip().split(",")[0] + "\n")
    assert run(capsys, "compare", sig, a)[1].strip() == "100"


def test_missing_input(tmp_path, capsys):
    code, _, err = run(capsys, "hash", tmp_path / "nope")
    assert code == INPUT_ERROR and "cannot read" in err


def test_transform_and_check(tmp_path, capsys):
    src = tmp_path / "frag.asm"
    src.write_text(REGSWAP_ORIGINAL)
    out = tmp_path / "frag_reg.asm"
    code, printed, _ = run(capsys, "transform", "--technique", "reg", "--seed", 2, src, out)
    assert code == OK and int(printed) >= 0
    assert (tmp_path / "frag_reg.asm.changes.csv").read_text().startswith("line,kind,technique,detail\n")
    code, printed, _ = run(capsys, "check", src, out)
    assert code == OK and printed.strip() == "equal"


def test_check_reports_difference(tmp_path, capsys):
    a, b = tmp_path / "a.asm", tmp_path / "b.asm"
    a.write_text("    mov rax, 1\n")
    b.write_text("    mov rax, 2\n")
    code, printed, _ = run(capsys, "check", a, b)
    assert code == DIFFERENT and printed.startswith("diverge")


def test_bad_listing_is_input_error(tmp_path, capsys):
    bad = tmp_path / "bad.asm"
    bad.write_bytes(b"\xff\xfe")
    assert run(capsys, "transform", "--technique", "dead", bad, tmp_path / "o.asm")[0] == INPUT_ERROR


def test_batch_outputs(corpus, capsys, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1500000000")
    (corpus / "_notes").mkdir()
    assert run(capsys, "batch", "--seed", 1, corpus)[0] == OK
    rep = corpus / "_reports"
    for f in ("hashes.txt", "signatures.txt", "similarity.txt", "records.csv", "constants.csv",
              "summary.txt", "manifest.json"):
        assert (rep / f).is_file()
    sims = parse_report((rep / "similarity.txt").read_text())
    assert len(sims) == 12
    for suffix in ("dead", "reg", "ins", "mix"):
        assert (corpus / "sample_0000" / f"sample_0000_{suffix}.asm").is_file()
    hashes = (rep / "hashes.txt").read_text().splitlines()
    ctl = (corpus / "sample_0002" / "sample_0002.asm").read_bytes()
    assert f"{sha1_digest(ctl)}:sample_0002.asm" in hashes
    assert '"created": "2017-07-14T02:40:00Z"' in (rep / "manifest.json").read_text()


def test_batch_compat_report(corpus, capsys):
    run(capsys, "batch", "--compat", "--report-dir", "exe", corpus)
    first = (corpus / "_reports" / "similarity.txt").read_text().splitlines()[0]
    assert first.startswith("exe//sample_0000.asm matches exe//sample_0000_dead.asm (")


def test_batch_deterministic(corpus, capsys):
    run(capsys, "batch", "--seed", 7, corpus)
    first = tree_digest(corpus)
    run(capsys, "batch", "--seed", 7, "--jobs", 2, corpus)
    assert tree_digest(corpus) == first


def test_crosscheck_cli(tmp_path, capsys):
    d = sha1_digest(b"rev")
    (tmp_path / "h.txt").write_text(f"{d}:rev\n{'0' * 40}:other\n")
    (tmp_path / "db.txt").write_text(f"{d}:35-57:link\n")
    out = tmp_path / "res.txt"
    assert run(capsys, "crosscheck", "--timestamp", "2019-07-03T10:00:00",
               tmp_path / "h.txt", tmp_path / "db.txt", out)[0] == OK
    assert out.read_text() == f"{d}, rev, 35-57 2019-03-07 10:00:00, link\n"
    (tmp_path / "h.txt").write_text("zz:rev\n")
    code, _, err = run(capsys, "crosscheck", tmp_path / "h.txt", tmp_path / "db.txt", out)
    assert code == INPUT_ERROR and "line 1" in err


def test_console_script_module():
    res = subprocess.run([sys.executable, "-m", "obfusclab.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "obfusclab" in res.stdout
