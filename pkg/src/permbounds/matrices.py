"""Dense complex column matrices, p-norms, and structured generators.

The workhorse type is ColumnMatrix, an immutable N x K complex matrix
(1 <= K <= N) whose columns are the working vectors.  Generators cover
the structured families used throughout the suites: rank-one matrices
with constant-modulus columns, the 3 x 3 circulant family, and seeded
random matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DEFAULT_RTOL",
    "RANDOM_MODES",
    "ColumnMatrix",
    "as_matrix",
    "p_norm",
    "validate_exponent",
    "make_rank_one_constant_modulus",
    "make_circulant3",
    "random_matrix",
    "matrix_to_json_dict",
    "matrix_from_json_dict",
]

DEFAULT_RTOL = 1e-9

RANDOM_MODES = ("complex-gaussian", "nonneg-uniform")


def validate_exponent(p, upper=None):
    """Check that p is a valid norm exponent (real, p >= 1); return float(p).

    upper, when given, additionally enforces p <= upper.  math.inf is
    accepted and denotes the max-norm.
    """
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise ValueError(f"norm exponent must satisfy p >= 1, got {p!r}")
    if upper is not None and p > upper:
        raise ValueError(f"norm exponent must satisfy p <= {upper}, got {p!r}")
    return p


@dataclass(frozen=True, eq=False)
class ColumnMatrix:
    """Immutable N x K complex matrix whose k-th column is the vector f_k.

    Invariants: 1 <= K <= N and every entry finite.  The entry array is
    exposed read-only as ``a``; ``rows()`` gives the K x N view whose
    row j is the j-th column vector.
    """

    a: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=complex)
        if a.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        n, k = a.shape
        if not 1 <= k <= n:
            raise ValueError(f"need 1 <= n_cols <= n_rows, got shape {n} x {k}")
        if not np.isfinite(a).all():
            raise ValueError("matrix entries must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @property
    def n_rows(self) -> int:
        return self.a.shape[0]

    @property
    def n_cols(self) -> int:
        return self.a.shape[1]

    @property
    def is_square(self) -> bool:
        return self.a.shape[0] == self.a.shape[1]

    def column(self, k):
        """Read-only view of column k."""
        return self.a[:, k]

    def rows(self):
        """Read-only K x N view: row j is the j-th column vector."""
        return self.a.T

    def transpose(self) -> "ColumnMatrix":
        """Transpose (square matrices only, so the result stays valid)."""
        if not self.is_square:
            raise ValueError("transpose is only defined for square matrices")
        return ColumnMatrix(self.a.T)


def as_matrix(value) -> ColumnMatrix:
    """Coerce an array-like to ColumnMatrix (pass-through when already one)."""
    if isinstance(value, ColumnMatrix):
        return value
    return ColumnMatrix(np.asarray(value))


def p_norm(v, p) -> float:
    """(sum_k |v_k|^p)^(1/p) of a nonempty finite vector; p=inf is max|v_k|."""
    p = validate_exponent(p)
    w = np.abs(np.asarray(v, dtype=complex).ravel())
    if w.size == 0:
        raise ValueError("p_norm of an empty vector")
    if not np.isfinite(w).all():
        raise ValueError("p_norm requires finite entries")
    top = float(w.max())
    if top == 0.0 or math.isinf(p):
        return top
    # scale out the largest modulus so large p cannot overflow
    return top * float(((w / top) ** p).sum() ** (1.0 / p))


def make_rank_one_constant_modulus(n, xi, zeta, r) -> ColumnMatrix:
    """Rank-one matrix F[j, k] = xi_j * zeta_k * r_k with unimodular xi, zeta.

    Every column has constant modulus r_k > 0 and all 2 x 2 minors vanish;
    these matrices saturate the permanent column-norm bound.
    """
    xi = np.asarray(xi, dtype=complex).ravel()
    zeta = np.asarray(zeta, dtype=complex).ravel()
    r = np.asarray(r, dtype=float).ravel()
    if not (xi.size == zeta.size == r.size == n):
        raise ValueError("xi, zeta, r must all have length n")
    for name, u in (("xi", xi), ("zeta", zeta)):
        if np.abs(np.abs(u) - 1.0).max() > 1e-12:
            raise ValueError(f"{name} entries must have unit modulus")
    if not (r > 0).all():
        raise ValueError("column moduli r must be strictly positive")
    return ColumnMatrix(np.outer(xi, zeta * r))


def make_circulant3(x, y) -> ColumnMatrix:
    """3 x 3 circulant with columns (1, x, y), (y, 1, x), (x, y, 1)."""
    x = float(x)
    y = float(y)
    return ColumnMatrix([[1.0, y, x], [x, 1.0, y], [y, x, 1.0]])


def random_matrix(n, k, mode, seed) -> ColumnMatrix:
    """Seeded random N x K matrix; mode is one of RANDOM_MODES."""
    if mode not in RANDOM_MODES:
        raise ValueError(f"mode must be one of {RANDOM_MODES}, got {mode!r}")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    rng = np.random.default_rng(seed)
    if mode == "complex-gaussian":
        a = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    else:
        a = rng.random((n, k))
    return ColumnMatrix(a)


def matrix_to_json_dict(m) -> dict:
    """Serialize to {"n", "k", "re", "im"} with row-major entry lists."""
    m = as_matrix(m)
    return {
        "n": int(m.n_rows),
        "k": int(m.n_cols),
        "re": m.a.real.tolist(),
        "im": m.a.imag.tolist(),
    }


def matrix_from_json_dict(d) -> ColumnMatrix:
    """Inverse of matrix_to_json_dict; "im" may be omitted for real input."""
    n = int(d["n"])
    k = int(d["k"])
    re = np.asarray(d["re"], dtype=float)
    im = np.asarray(d.get("im") if d.get("im") is not None else np.zeros((n, k)), dtype=float)
    if re.shape != (n, k) or im.shape != (n, k):
        raise ValueError("entry lists must have shape n x k")
    return ColumnMatrix(re + 1j * im)
