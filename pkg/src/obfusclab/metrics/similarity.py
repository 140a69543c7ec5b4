"""Control-versus-variant similarity records and the report text format."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..ctph import fuzzy_compare, fuzzy_hash
from ..transforms.base import Technique

_ORDER = {t: i for i, t in enumerate(Technique)}
REPORT_RE = re.compile(
    r"^(?P<dir>[^\s/]+)(?P<sep>//?)(?P<base>[^\s/]+)\.(?P<ext>\w+) matches "
    r"(?P=dir)(?P=sep)(?P<variant>[^\s/]+)\.(?P=ext) \((?P<score>\d{1,3})\)$"
)


@dataclass(frozen=True)
class SimilarityRecord:
    base_name: str
    variant_name: str
    technique: Technique
    score: int

    def __post_init__(self):
        if not 0 <= self.score <= 100:
            raise ValueError(f"score {self.score} outside [0, 100]")


def format_report_line(rec: SimilarityRecord, directory: str = "corpus", ext: str = "asm",
                       compat: bool = False) -> str:
    """``dir/base.asm matches dir/base_dead.asm (57)``; ``compat`` doubles the slash."""
    sep = "//" if compat else "/"
    return (f"{directory}{sep}{rec.base_name}.{ext} matches "
            f"{directory}{sep}{rec.variant_name}.{ext} ({rec.score})")


def format_report(records, directory: str = "corpus", ext: str = "asm", compat: bool = False) -> str:
    return "".join(format_report_line(r, directory, ext, compat) + "\n" for r in records)


def parse_report_line(line: str) -> SimilarityRecord:
    m = REPORT_RE.match(line.rstrip("\n"))
    if not m:
        raise ValueError(f"not a similarity report line: {line!r}")
    base, variant = m.group("base"), m.group("variant")
    head, _, suffix = variant.rpartition("_")
    if head != base:
        raise ValueError(f"variant {variant!r} does not extend {base!r}")
    return SimilarityRecord(base, variant, Technique.from_short(suffix), int(m.group("score")))


def parse_report(text: str) -> list[SimilarityRecord]:
    return [parse_report_line(ln) for ln in text.splitlines() if ln.strip()]


def build_similarity_matrix(corpus, errors: list | None = None) -> list[SimilarityRecord]:
    """Score every variant against its control.

    ``corpus`` maps sample name to ``{"control": bytes, Technique: bytes, ...}``.
    A sample without a control is skipped and noted in ``errors``.
    """
    out = []
    for name in sorted(corpus):
        files = corpus[name]
        control = files.get("control")
        if control is None:
            if errors is not None:
                errors.append(f"{name}: missing control")
            continue
        base_sig = fuzzy_hash(control)
        for key, data in files.items():
            if key == "control":
                continue
            t = key if isinstance(key, Technique) else Technique.from_short(key)
            score = fuzzy_compare(base_sig, fuzzy_hash(data))
            out.append(SimilarityRecord(name, f"{name}_{t.suffix}", t, score))
    out.sort(key=lambda r: (r.base_name, _ORDER[r.technique]))
    return out
