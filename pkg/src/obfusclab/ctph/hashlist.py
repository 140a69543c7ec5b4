"""SHA-1 digests and the ``<sha1>:<name>`` hash-list format."""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

_HEX40 = re.compile(r"^[0-9a-f]{40}$")


class HashListError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def sha1_digest(data: bytes) -> str:
    return hashlib.sha1(data).hexdigest()


@dataclass(frozen=True)
class Sha1Record:
    digest: str
    name: str

    def __post_init__(self):
        if not _HEX40.match(self.digest):
            raise ValueError(f"not a lowercase 40-digit SHA-1: {self.digest!r}")

    def __str__(self) -> str:
        return f"{self.digest}:{self.name}"


def parse_hashlist(text: str) -> list[Sha1Record]:
    """Parse ``<sha1>:<name>`` lines; blank lines are skipped.

    Raises :class:`HashListError` carrying the 1-based line number of the
    first malformed entry.
    """
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        digest, sep, name = line.partition(":")
        if not sep or not name:
            raise HashListError(lineno, f"expected <sha1>:<name>, got {line!r}")
        if not _HEX40.match(digest):
            raise HashListError(lineno, f"bad SHA-1 {digest!r}")
        records.append(Sha1Record(digest, name))
    return records


def emit_hashlist(records) -> str:
    return "".join(f"{r}\n" for r in records)
