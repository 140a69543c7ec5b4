"""Context triggered piecewise hashing and SHA-1 hash lists."""

from .core import (
    B64,
    FILE_HEADER,
    FuzzySignature,
    RollingState,
    SignatureFormatError,
    eliminate_sequences,
    format_signature,
    format_signature_file,
    fuzzy_compare,
    fuzzy_hash,
    parse_signature,
    parse_signature_file,
    piece_hash,
    roll_update,
    weighted_edit_distance,
)
from .hashlist import HashListError, Sha1Record, emit_hashlist, parse_hashlist, sha1_digest

__all__ = [
    "B64", "FILE_HEADER", "FuzzySignature", "HashListError", "RollingState",
    "Sha1Record", "SignatureFormatError", "eliminate_sequences", "emit_hashlist",
    "format_signature", "format_signature_file", "fuzzy_compare", "fuzzy_hash",
    "parse_hashlist", "parse_signature", "parse_signature_file", "piece_hash",
    "roll_update", "sha1_digest", "weighted_edit_distance",
]
