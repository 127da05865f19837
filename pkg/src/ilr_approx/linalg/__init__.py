from .linalg import EigenResult, SymmetricMatrix, quadratic_form, sym_eigen

__all__ = [
    "EigenResult",
    "SymmetricMatrix",
    "quadratic_form",
    "sym_eigen",
]
