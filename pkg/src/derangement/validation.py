"""Input validation helpers shared by the estimator and the command line."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .costs import CostMatrix
from .exceptions import ParseError, SizeMismatch
from .loop import check_start
from .permutation import ASSIGNMENT, Permutation, from_mapping, parse_permutation


def check_cost_matrix(X) -> CostMatrix:
    """Coerce ``X`` (array-like or :class:`CostMatrix`) to a validated matrix."""
    if isinstance(X, CostMatrix):
        return X
    arr = check_array(X, dtype=None, ensure_all_finite=True, ensure_min_samples=1)
    if arr.shape[0] != arr.shape[1]:
        raise ParseError(f"cost matrix must be square, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        as_int = arr.astype(np.int64)
        if not np.array_equal(as_int, arr):
            raise ParseError("costs must be integers")
        arr = as_int
    return CostMatrix(arr)


def check_derangement(d, n: int, mode: str = ASSIGNMENT) -> Permutation:
    """Accept a Permutation, a 1-indexed image sequence or a text form."""
    if isinstance(d, str):
        p = parse_permutation(d, n)
    elif isinstance(d, Permutation):
        p = d
    else:
        p = from_mapping(list(d))
    if p.n != n:
        raise SizeMismatch(f"derangement has {p.n} points, matrix {n}")
    check_start(p, mode)
    return p
