"""Similarity matrices, the change constant, and their aggregation."""

from .constants import UndefinedInput, change_constant, similarity_from_constant
from .crosscheck import Detection, crosscheck_hashes, parse_detection_db
from .records import (
    GROUPS,
    AggregateReport,
    ChangeConstantRecord,
    aggregate,
    constants_table_csv,
    group_of,
    records_csv,
)
from .similarity import (
    REPORT_RE,
    SimilarityRecord,
    build_similarity_matrix,
    format_report,
    format_report_line,
    parse_report,
    parse_report_line,
)
from .reference import load_rows, missing_payloads, reference_records

__all__ = [
    "GROUPS", "REPORT_RE", "AggregateReport", "ChangeConstantRecord", "Detection", "SimilarityRecord",
    "UndefinedInput", "aggregate", "build_similarity_matrix", "change_constant", "constants_table_csv",
    "crosscheck_hashes", "format_report", "format_report_line", "group_of", "load_rows",
    "missing_payloads", "parse_detection_db", "parse_report", "parse_report_line", "records_csv",
    "similarity_from_constant", "reference_records",
]
