from .composition import (
    Composition,
    ContrastMatrix,
    IlrVector,
    SbpMatrix,
    SbpReport,
    ZeroPolicy,
    close,
    contrast_matrix,
    ilr,
    ilr_balances,
    ilr_batch,
    inverse_ilr,
    pivotal_sbp,
    replace_zeros,
    validate_sbp,
)

__all__ = [
    "Composition",
    "ContrastMatrix",
    "IlrVector",
    "SbpMatrix",
    "SbpReport",
    "ZeroPolicy",
    "close",
    "contrast_matrix",
    "ilr",
    "ilr_balances",
    "ilr_batch",
    "inverse_ilr",
    "pivotal_sbp",
    "replace_zeros",
    "validate_sbp",
]
