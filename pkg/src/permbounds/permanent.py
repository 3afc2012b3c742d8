"""Exact permanent kernels and sub-permanent functionals.

``perm_fast`` implements Ryser's inclusion-exclusion formula with
Gray-code subset stepping, O(2^n * n) arithmetic; ``perm_naive`` expands
over all n! permutations and serves as the independent oracle on small
orders.  ``perm_fast_batch`` runs the same recurrence across a stack of
equal-sized matrices, which is what the batch verification suites use.

Roundoff note: Ryser's alternating sum can lose up to ~2^n * eps of the
largest intermediate product to cancellation, so the oracle band where
both engines are cross-checked is pinned at n <= 9, far below where the
error could approach the verification tolerances.

The sub-permanent functionals aggregate permanents of the K x K minors
obtained by choosing K of the N columns of a K x N family of rows;
complex input is reduced to entrywise modulus first.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

from .matrices import ColumnMatrix, validate_exponent

__all__ = [
    "perm_naive",
    "perm_fast",
    "perm_fast_batch",
    "perm_minor_gradient",
    "subperm_quadratic",
    "subperm_p",
    "subperm_p_batch",
    "NAIVE_ORDER_CAP",
    "FAST_ORDER_CAP",
]

NAIVE_ORDER_CAP = 9
FAST_ORDER_CAP = 30


def _square_array(m) -> np.ndarray:
    """Coerce to a square 2-d float64/complex128 ndarray."""
    a = m.a if isinstance(m, ColumnMatrix) else np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"square matrix required, got shape {a.shape}")
    if np.iscomplexobj(a):
        return np.ascontiguousarray(a, dtype=complex)
    return np.ascontiguousarray(a, dtype=float)


@lru_cache(maxsize=12)
def permutation_indices(n: int) -> np.ndarray:
    """All permutations of range(n) in lexicographic order, shape (n!, n)."""
    out = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    out.setflags(write=False)
    return out


def perm_naive(m) -> complex:
    """Permanent by expansion over all n! permutations (oracle, n <= 9)."""
    a = _square_array(m)
    n = a.shape[0]
    if n > NAIVE_ORDER_CAP:
        raise ValueError(f"perm_naive is capped at n <= {NAIVE_ORDER_CAP}, got {n}")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    perms = permutation_indices(n)
    terms = a[np.arange(n), perms]
    return complex(terms.prod(axis=1).sum())


def perm_fast_batch(stack) -> np.ndarray:
    """Ryser permanents of a (B, n, n) stack, returned as a (B,) array.

    Gray-code stepping updates one column sum per subset, so each of the
    2^n - 1 subsets costs O(n) per matrix.
    """
    a = np.asarray(stack)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError(f"(B, n, n) stack required, got shape {a.shape}")
    if np.iscomplexobj(a):
        a = np.ascontiguousarray(a, dtype=complex)
    else:
        a = np.ascontiguousarray(a, dtype=float)
    b, n = a.shape[0], a.shape[1]
    if n > FAST_ORDER_CAP:
        raise ValueError(f"perm_fast is capped at n <= {FAST_ORDER_CAP}, got {n}")
    w = np.zeros((b, n), dtype=a.dtype)
    total = np.zeros(b, dtype=a.dtype)
    for k in range(1, 1 << n):
        bit = (k & -k).bit_length() - 1
        if (k ^ (k >> 1)) & (1 << bit):
            w += a[:, :, bit]
        else:
            w -= a[:, :, bit]
        term = w.prod(axis=1)
        # the subset size parity alternates with k, starting odd at k=1
        if k & 1:
            total -= term
        else:
            total += term
    if n & 1:
        total = -total
    return total


def perm_fast(m) -> complex:
    """Permanent via Ryser's formula (n <= 30); matches perm_naive on n <= 9."""
    a = _square_array(m)
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    return complex(perm_fast_batch(a[None, :, :])[0])


def perm_minor_gradient(m) -> np.ndarray:
    """G[j, k] = permanent of m with row j and column k deleted.

    G is the entrywise derivative of the permanent, and for every row j
    the expansion sum_k m[j, k] * G[j, k] recovers perm(m).
    """
    a = _square_array(m)
    n = a.shape[0]
    if n == 1:
        return np.ones((1, 1), dtype=a.dtype)
    idx = np.arange(n)
    minors = np.empty((n * n, n - 1, n - 1), dtype=a.dtype)
    for j in range(n):
        sub = a[idx != j, :]
        for k in range(n):
            minors[j * n + k] = sub[:, idx != k]
    return perm_fast_batch(minors).reshape(n, n)


def _rows_array(rows) -> np.ndarray:
    """Coerce a K x N family of row vectors (K <= N) to a 2-d ndarray."""
    if isinstance(rows, ColumnMatrix):
        a = rows.rows()
    else:
        a = np.asarray(rows)
        if a.ndim == 1:
            a = a[None, :]
    if a.ndim != 2:
        raise ValueError("rows must form a 2-d array")
    k, n = a.shape
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= K <= N rows, got {k} x {n}")
    if not np.isfinite(a).all():
        raise ValueError("row entries must be finite")
    return a


def subperm_p(rows, p, k=None) -> float:
    """p-aggregated sub-permanent functional of K rows of length N.

    Value: (sum over the C(N, K) column subsets, in lexicographic order,
    of |perm(K x K minor)|^p)^(1/p), evaluated on the entrywise moduli.
    Reduces to subperm_quadratic at p = 2 and to |perm| at K = N.
    """
    p = validate_exponent(p)
    if math.isinf(p):
        raise ValueError("subperm_p requires a finite exponent")
    a = _rows_array(rows)
    nrows, ncols = a.shape
    if k is not None and k != nrows:
        raise ValueError(f"K={k} does not match the {nrows} rows given")
    b = np.abs(a)
    terms = [
        abs(perm_fast(b[:, cols]))
        for cols in itertools.combinations(range(ncols), nrows)
    ]
    return float(math.fsum(t**p for t in terms) ** (1.0 / p))


def subperm_quadratic(rows, k=None) -> float:
    """Quadratic sub-permanent functional: sqrt of the sum of squared minors."""
    return subperm_p(rows, 2.0, k)


def subperm_p_batch(stack, p) -> np.ndarray:
    """subperm_p across a (B, K, N) stack; returns a (B,) array."""
    p = validate_exponent(p)
    a = np.abs(np.asarray(stack))
    if a.ndim != 3:
        raise ValueError("(B, K, N) stack required")
    _, k, n = a.shape
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= K <= N rows, got {k} x {n}")
    acc = np.zeros(a.shape[0])
    for cols in itertools.combinations(range(n), k):
        acc += np.abs(perm_fast_batch(a[:, :, cols])) ** p
    return acc ** (1.0 / p)
