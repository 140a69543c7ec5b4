"""Offline lookup of hash lists in a local detection database."""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime

from ..ctph.hashlist import HashListError, Sha1Record, parse_hashlist

DAY_FIRST_TIME = "%Y-%d-%m %H:%M:%S"  # day before month, as the log format prints it
ISO_TIME = "%Y-%m-%d %H:%M:%S"
_DB_RE = re.compile(r"^(?P<digest>[0-9a-f]{40}):(?P<det>\d+)-(?P<tot>\d+):(?P<link>\S*)$")
RESULT_RE = re.compile(
    r"^(?P<digest>[0-9a-f]{40}), (?P<name>.+), (?P<det>\d+)-(?P<tot>\d+) "
    r"(?P<stamp>\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2}), (?P<link>\S*)$"
)


@dataclass(frozen=True)
class Detection:
    digest: str
    detected: int
    total: int
    link: str

    def __str__(self) -> str:
        return f"{self.digest}:{self.detected}-{self.total}:{self.link}"


def parse_detection_db(text: str) -> dict[str, Detection]:
    db = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        m = _DB_RE.match(line.strip())
        if not m:
            raise HashListError(lineno, f"expected <sha1>:<detected>-<total>:<link>, got {line!r}")
        det, tot = int(m.group("det")), int(m.group("tot"))
        if det > tot:
            raise HashListError(lineno, "detected count exceeds total")
        db[m.group("digest")] = Detection(m.group("digest"), det, tot, m.group("link"))
    return db


def crosscheck_hashes(hashlist, db: dict[str, Detection], when: datetime, iso: bool = False) -> str:
    """One log line per listed digest found in ``db``; absent digests print nothing."""
    records = parse_hashlist(hashlist) if isinstance(hashlist, str) else list(hashlist)
    stamp = when.strftime(ISO_TIME if iso else DAY_FIRST_TIME)
    out = []
    for rec in records:
        hit = db.get(rec.digest)
        if hit is not None:
            out.append(f"{rec.digest}, {rec.name}, {hit.detected}-{hit.total} {stamp}, {hit.link}\n")
    return "".join(out)


__all__ = ["Detection", "ISO_TIME", "DAY_FIRST_TIME", "RESULT_RE", "Sha1Record", "crosscheck_hashes",
           "parse_detection_db"]
