"""Index tables for dense triangular storage of bivariate jets.

A jet of order n keeps the monomial coefficients c[i, j] (coefficient of
x^i y^j) for i + j <= n, flattened row-major in i.  Tables are tiny and
cached per order; both kernel backends consume them.
"""

from functools import lru_cache
from math import factorial

import numpy as np

MAX_ORDER = 6


@lru_cache(maxsize=None)
def indices(order: int) -> tuple:
    """Exponent pairs (i, j) in storage order."""
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"jet order must be in [0, {MAX_ORDER}], got {order}")
    return tuple((i, j) for i in range(order + 1) for j in range(order + 1 - i))


@lru_cache(maxsize=None)
def position(order: int) -> dict:
    return {ij: k for k, ij in enumerate(indices(order))}


@lru_cache(maxsize=None)
def size(order: int) -> int:
    return (order + 1) * (order + 2) // 2


@lru_cache(maxsize=None)
def factorials(order: int) -> np.ndarray:
    """f_ij = c[i,j] * fact[k] converts monomial coefficients to derivatives."""
    return np.array([factorial(i) * factorial(j) for i, j in indices(order)])


@lru_cache(maxsize=None)
def mul_table(order: int):
    """Triples (out, a, b) with exponent sums inside the truncation order."""
    ij = indices(order)
    pos = position(order)
    out, aa, bb = [], [], []
    for ka, (ia, ja) in enumerate(ij):
        for kb, (ib, jb) in enumerate(ij):
            if ia + ib + ja + jb <= order:
                out.append(pos[(ia + ib, ja + jb)])
                aa.append(ka)
                bb.append(kb)
    return (
        np.asarray(out, dtype=np.int32),
        np.asarray(aa, dtype=np.int32),
        np.asarray(bb, dtype=np.int32),
    )


@lru_cache(maxsize=None)
def restrict_table(order_from: int, order_to: int) -> np.ndarray:
    """Positions in the source layout of the coefficients kept by truncation."""
    pos = position(order_from)
    return np.asarray([pos[ij] for ij in indices(order_to)], dtype=np.int32)
