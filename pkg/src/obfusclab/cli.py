"""Command-line entry point: ``obfusclab <command> ...``.

Exit codes: 0 success, 1 check found a difference, 2 input error, 3 output error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .asm import AsmParseError, emit_listing, instruction_line_count, parse_listing
from .asm.generate import generate_listing
from .ctph import (
    HashListError,
    Sha1Record,
    emit_hashlist,
    format_signature,
    format_signature_file,
    fuzzy_compare,
    fuzzy_hash,
    parse_signature,
    sha1_digest,
)
from .metrics import (
    ChangeConstantRecord,
    SimilarityRecord,
    aggregate,
    constants_table_csv,
    crosscheck_hashes,
    format_report,
    parse_detection_db,
    records_csv,
)
from .rng import SplitMix64
from .semcheck import equivalent
from .transforms import Technique, TransformConfig, apply

OK, DIFFERENT, INPUT_ERROR, OUTPUT_ERROR = 0, 1, 2, 3
VARIANT_ORDER = (Technique.DEAD_CODE, Technique.REGISTER_SUB, Technique.INSTR_REPLACE, Technique.MIXED)
REPORT_DIR = "_reports"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_bytes(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(INPUT_ERROR, f"cannot read {path}: {exc.strerror}") from None


def _read_text(path) -> str:
    try:
        return _read_bytes(path).decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CliError(INPUT_ERROR, f"{path}: not UTF-8 ({exc.reason})") from None


def _write(path, text: str) -> None:
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(OUTPUT_ERROR, f"cannot write {path}: {exc.strerror}") from None


def _parse(path):
    try:
        return parse_listing(_read_text(path), Path(path).stem)
    except AsmParseError as exc:
        raise CliError(INPUT_ERROR, f"{path}: {exc}") from None


def _signature(path):
    """A signature from a file, or the file's own text if it already is one."""
    data = _read_bytes(path)
    try:
        return parse_signature(data.decode("ascii").strip())
    except (UnicodeDecodeError, ValueError):
        return fuzzy_hash(data, name=str(path))


# -- hash / compare / check -------------------------------------------------

def cmd_hash(args) -> int:
    for path in args.files:
        print(format_signature(fuzzy_hash(_read_bytes(path), name=path)))
    return OK


def cmd_compare(args) -> int:
    print(fuzzy_compare(_signature(args.a), _signature(args.b)))
    return OK


def cmd_check(args) -> int:
    report = equivalent(_parse(args.a), _parse(args.b), args.trials, args.seed)
    print(report)
    return OK if report.equal else DIFFERENT


# -- transform --------------------------------------------------------------

def cmd_transform(args) -> int:
    program = _parse(args.input)
    result = apply(Technique.from_short(args.technique), program, TransformConfig(seed=args.seed))
    _write(args.output, emit_listing(result.program))
    _write(f"{args.output}.changes.csv", result.log.to_csv())
    print(result.change_count)
    return OK


# -- batch ------------------------------------------------------------------

def _samples(root: Path) -> list[Path]:
    return sorted(p for p in root.iterdir() if p.is_dir() and not p.name.startswith(("_", ".")))


def _process_sample(folder: str, seed: int) -> dict:
    """Transform one sample folder; returns everything the reports need."""
    folder = Path(folder)
    name = folder.name
    control = folder / f"{name}.asm"
    try:
        program = parse_listing(control.read_text(encoding="utf-8"), name)
    except (OSError, UnicodeDecodeError, AsmParseError) as exc:
        return {"name": name, "error": f"{control}: {exc}"}
    texts = {"control": emit_listing(program)}
    info = {"name": name, "lines": instruction_line_count(program), "changes": {}, "files": {}, "logs": {}}
    cfg = TransformConfig(seed=seed)
    for t in VARIANT_ORDER:
        res = apply(t, program, cfg)
        texts[t] = emit_listing(res.program)
        info["changes"][t.value] = res.change_count
        info["logs"][t.suffix] = res.log.to_csv()
    base_sig = fuzzy_hash(texts["control"].encode(), name=f"{name}/{name}.asm")
    info["signatures"] = [base_sig]
    info["hashes"] = [Sha1Record(sha1_digest(texts["control"].encode()), f"{name}.asm")]
    info["scores"] = {}
    for t in VARIANT_ORDER:
        data = texts[t].encode()
        sig = fuzzy_hash(data, name=f"{name}/{name}_{t.suffix}.asm")
        info["signatures"].append(sig)
        info["hashes"].append(Sha1Record(sha1_digest(data), f"{name}_{t.suffix}.asm"))
        info["scores"][t.value] = fuzzy_compare(base_sig, sig)
        info["files"][t.suffix] = texts[t]
    return info


def _epoch(samples: list[Path]) -> datetime:
    """Run timestamp: SOURCE_DATE_EPOCH if set, else the newest control file's mtime."""
    env = os.environ.get("SOURCE_DATE_EPOCH")
    if env is not None:
        return datetime.fromtimestamp(int(env), timezone.utc)
    mtimes = [int((s / f"{s.name}.asm").stat().st_mtime) for s in samples if (s / f"{s.name}.asm").exists()]
    return datetime.fromtimestamp(max(mtimes, default=0), timezone.utc)


def cmd_batch(args) -> int:
    root = Path(args.root)
    if not root.is_dir():
        raise CliError(INPUT_ERROR, f"{root}: not a corpus directory")
    out = Path(args.out) if args.out else root / REPORT_DIR
    samples = _samples(root)
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_process_sample, map(str, samples), [args.seed] * len(samples)))
    else:
        results = [_process_sample(str(s), args.seed) for s in samples]
    results.sort(key=lambda r: r["name"])

    sims, records, hashes, sigs, failures, manifest_samples = [], [], [], [], [], []
    for info in results:
        name = info["name"]
        if "error" in info:
            print(f"skipped {info['error']}", file=sys.stderr)
            failures.append(info["error"])
            continue
        for suffix, text in info["files"].items():
            _write(root / name / f"{name}_{suffix}.asm", text)
            _write(out / "changes" / f"{name}_{suffix}.changes.csv", info["logs"][suffix])
        for t in VARIANT_ORDER:
            score, n = info["scores"][t.value], info["changes"][t.value]
            sims.append(SimilarityRecord(name, f"{name}_{t.suffix}", t, score))
            records.append(ChangeConstantRecord(name, t, info["lines"], n, score))
        hashes.extend(info["hashes"])
        sigs.extend(info["signatures"])
        manifest_samples.append({"name": name, "lines": info["lines"], "changes": info["changes"]})

    report = aggregate(records)
    _write(out / "hashes.txt", emit_hashlist(hashes))
    _write(out / "signatures.txt", format_signature_file(sigs))
    _write(out / "similarity.txt", format_report(sims, ext="asm", compat=args.compat, directory=args.report_dir))
    _write(out / "records.csv", records_csv(records))
    _write(out / "constants.csv", constants_table_csv(records, report))
    _write(out / "summary.txt", _summary(report, len(manifest_samples), failures))
    manifest = {
        "tool": "obfusclab",
        "version": __version__,
        "seed": args.seed,
        "corpus_root": str(args.root),
        "created": _epoch(samples).strftime("%Y-%m-%dT%H:%M:%SZ"),
        "config": TransformConfig(seed=args.seed).__dict__,
        "samples": manifest_samples,
        "failures": failures,
    }
    _write(out / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"{len(manifest_samples)} samples, {len(failures)} skipped -> {out}")
    return OK


def _summary(report, n_samples: int, failures) -> str:
    lines = [f"samples: {n_samples}", f"skipped: {len(failures)}"]
    for t in VARIANT_ORDER:
        if t not in report.counts:
            lines.append(f"{t.value}: no records")
            continue
        lines.append(
            f"{t.value}: records={report.counts[t]} mean_similarity={report.similarity_means[t]:.4f} "
            f"mean_constant={report.total_means[t]:.9f} pooled_constant={report.pooled_means[t]:.9f}"
        )
    return "\n".join(lines) + "\n"


# -- crosscheck / gen -------------------------------------------------------

def cmd_crosscheck(args) -> int:
    try:
        db = parse_detection_db(_read_text(args.db))
    except HashListError as exc:
        raise CliError(INPUT_ERROR, f"{args.db}: {exc}") from None
    when = datetime.fromisoformat(args.timestamp) if args.timestamp else datetime.now()
    try:
        text = crosscheck_hashes(_read_text(args.hashes), db, when, iso=args.iso)
    except HashListError as exc:
        raise CliError(INPUT_ERROR, f"{args.hashes}: {exc}") from None
    _write(args.out, text)
    return OK


def _line_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition("-")
    try:
        lo_i, hi_i = int(lo), int(hi or lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected L or MIN-MAX, got {text!r}") from None
    if not 1 <= lo_i <= hi_i:
        raise argparse.ArgumentTypeError("need 1 <= MIN <= MAX")
    return lo_i, hi_i


def cmd_gen(args) -> int:
    rng = SplitMix64(args.seed)
    lo, hi = args.lines
    width = max(4, len(str(args.count - 1)))
    for i in range(args.count):
        name = f"sample_{i:0{width}d}"
        n = rng.randint(lo, hi)
        _write(Path(args.root) / name / f"{name}.asm", generate_listing(rng.next(), n, name))
    print(f"wrote {args.count} samples to {args.root}")
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="obfusclab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("hash", help="print CTPH signatures")
    s.add_argument("files", nargs="+")
    s.set_defaults(func=cmd_hash)

    s = sub.add_parser("compare", help="print the 0-100 similarity of two files or signatures")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("check", help="differentially execute two listings")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("transform", help="obfuscate one listing")
    s.add_argument("--technique", required=True, choices=["dead", "reg", "ins", "mix"])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("input")
    s.add_argument("output")
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("batch", help="build all variants and reports for a corpus")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", help=f"report directory (default <root>/{REPORT_DIR})")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--compat", action="store_true", help="double the slash in report paths")
    s.add_argument("--report-dir", default="corpus", help="directory label used in report lines")
    s.add_argument("root")
    s.set_defaults(func=cmd_batch)

    s = sub.add_parser("crosscheck", help="look up a hash list in a local detection database")
    s.add_argument("--iso", action="store_true", help="write timestamps as YYYY-MM-DD")
    s.add_argument("--timestamp", help="ISO timestamp to stamp results with (default: now)")
    s.add_argument("hashes")
    s.add_argument("db")
    s.add_argument("out")
    s.set_defaults(func=cmd_crosscheck)

    s = sub.add_parser("gen", help="write synthetic sample listings")
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--lines", type=_line_range, required=True, metavar="L|MIN-MAX")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("root")
    s.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"obfusclab: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"obfusclab: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
