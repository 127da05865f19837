from .reports import (
    COMPARISON_COLUMNS,
    SUMMARY_COLUMNS,
    build_manifest,
    comparisons_frame,
    compositions_frame,
    qq_frame,
    read_manifest,
    summary_frame,
    table3_frame,
    versions,
    write_csv,
    write_manifest,
)

__all__ = [
    "COMPARISON_COLUMNS",
    "SUMMARY_COLUMNS",
    "build_manifest",
    "comparisons_frame",
    "compositions_frame",
    "qq_frame",
    "read_manifest",
    "summary_frame",
    "table3_frame",
    "versions",
    "write_csv",
    "write_manifest",
]
