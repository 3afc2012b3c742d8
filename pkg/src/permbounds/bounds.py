"""Inequality checkers with slack reporting and equality classification.

Covered inequalities, all of Hadamard type (a matrix functional bounded
by a product of column norms):

* ``check_permanent_bound``:  |perm(F)| <= (N!/N^(N/2)) * prod |f_k|_2,
  with constructive classification of the equality cases;
* ``check_determinant_bound``:  |det(F)| <= prod |f_k|_2 (companion);
* ``check_subperm_bound`` / ``check_subperm_p_bound``: the quadratic and
  p-aggregated sub-permanent functionals of K rows in R^N against
  sqrt(C(N,K)) * K!/N^(K/2) * prod |f_j|_2 and its C(N,K)^(1/p) variant;
* ``sharp_constant_lower`` / ``sharp_constant_upper``: the proven
  envelopes max{1, N!/N^(N/p)} <= C(p) <= (N!/N^(N/2))^(2-2/p).

Equality in the permanent bound happens exactly when some column is zero
or the matrix is rank one with constant-modulus columns; the classifier
tests the per-column modulus spread and the quartet products
F[j,k]F[l,m] - F[j,m]F[l,k] and, on success, reconstructs the witness
(xi, zeta, r) from the first row and column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .matrices import DEFAULT_RTOL, ColumnMatrix, as_matrix, p_norm, validate_exponent
from .permanent import _rows_array, perm_fast, subperm_p, subperm_quadratic

__all__ = [
    "ZERO_COLUMN",
    "RANK_ONE_CONSTANT_MODULUS",
    "STRICT",
    "Witness",
    "EqualityClass",
    "RatioReport",
    "permanent_bound_coefficient",
    "subperm_bound_coefficient",
    "classify_equality",
    "check_permanent_bound",
    "check_determinant_bound",
    "check_subperm_bound",
    "check_subperm_p_bound",
    "sharp_constant_lower",
    "sharp_constant_upper",
    "REPORT_CSV_COLUMNS",
    "report_csv_header",
    "report_csv_row",
    "report_json_dict",
]

ZERO_COLUMN = "ZeroColumn"
RANK_ONE_CONSTANT_MODULUS = "RankOneConstantModulus"
STRICT = "Strict"

ZERO_COLUMN_CUTOFF = 1e-12  # relative to the largest column norm


@dataclass(frozen=True, eq=False)
class Witness:
    """Factors reproducing a rank-one constant-modulus matrix.

    F[j, k] = xi[j] * zeta[k] * r[k] with |xi[j]| = |zeta[k]| = 1, r > 0.
    """

    xi: np.ndarray
    zeta: np.ndarray
    r: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return np.outer(self.xi, self.zeta * self.r)


@dataclass(frozen=True, eq=False)
class EqualityClass:
    """Equality-case tag plus, for the rank-one class, a witness."""

    tag: str
    witness: Optional[Witness] = None


@dataclass(frozen=True, eq=False)
class RatioReport:
    """One inequality instance: sides, ratio, slack, and classification.

    ratio is lhs/rhs, defined as 0 when both sides vanish; slack is
    rhs - lhs and is >= -tolerance whenever the checked inequality
    holds.  equality_class is populated only by the permanent bound;
    holder_slack only by the p-aggregated sub-permanent bound (its
    intermediate comparison against C(N,K)^(1/p-1/2) * quadratic value).
    """

    lhs: float
    rhs: float
    ratio: float
    slack: float
    equality_class: Optional[EqualityClass] = None
    n: Optional[int] = None
    k: Optional[int] = None
    p: Optional[float] = None
    holder_slack: Optional[float] = None


def _ratio(lhs: float, rhs: float) -> float:
    if rhs > 0.0:
        return lhs / rhs
    return 0.0 if lhs == 0.0 else math.inf


def permanent_bound_coefficient(n: int) -> float:
    """N!/N^(N/2), the sharp coefficient for unit 2-norm columns."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.factorial(n) / n ** (n / 2.0)


def subperm_bound_coefficient(n: int, k: int, p: float = 2.0) -> float:
    """C(N,K)^(1/p) * K!/N^(K/2), the K-row sub-permanent coefficient."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    p = validate_exponent(p, upper=2.0)
    return math.comb(n, k) ** (1.0 / p) * math.factorial(k) / n ** (k / 2.0)


def classify_equality(f, rtol: float = DEFAULT_RTOL) -> EqualityClass:
    """Classify a square matrix against the permanent-bound equality cases.

    ZeroColumn when some column norm falls below 1e-12 of the largest;
    RankOneConstantModulus when every column has constant modulus within
    rtol and every quartet product identity holds within rtol (a witness
    is attached); Strict otherwise.
    """
    m = as_matrix(f)
    if not m.is_square:
        raise ValueError("classification is defined for square matrices")
    a = m.a
    n = m.n_rows
    mods = np.abs(a)
    col_norms = np.sqrt((mods**2).sum(axis=0))
    top = col_norms.max()
    if top == 0.0 or (col_norms < ZERO_COLUMN_CUTOFF * top).any():
        return EqualityClass(ZERO_COLUMN)
    hi = mods.max(axis=0)
    lo = mods.min(axis=0)
    if ((hi - lo) > rtol * hi).any():
        return EqualityClass(STRICT)
    for j in range(n - 1):
        for l in range(j + 1, n):
            outer = np.outer(a[j], a[l])
            if (np.abs(outer - outer.T) > rtol * np.abs(outer)).any():
                return EqualityClass(STRICT)
    r = mods.mean(axis=0)
    z = a / r
    zeta = z[0] / np.abs(z[0])
    xi = z[:, 0] / z[0, 0]
    xi = xi / np.abs(xi)
    return EqualityClass(RANK_ONE_CONSTANT_MODULUS, Witness(xi=xi, zeta=zeta, r=r))


def check_permanent_bound(f, rtol: float = DEFAULT_RTOL) -> RatioReport:
    """|perm(F)| against (N!/N^(N/2)) * prod of column 2-norms."""
    m = as_matrix(f)
    if not m.is_square:
        raise ValueError("the permanent bound applies to square matrices")
    n = m.n_rows
    lhs = abs(perm_fast(m))
    rhs = permanent_bound_coefficient(n) * math.prod(
        p_norm(m.column(k), 2.0) for k in range(n)
    )
    return RatioReport(
        lhs=lhs,
        rhs=rhs,
        ratio=_ratio(lhs, rhs),
        slack=rhs - lhs,
        equality_class=classify_equality(m, rtol),
        n=n,
        k=n,
        p=2.0,
    )


def check_determinant_bound(f) -> RatioReport:
    """|det(F)| against prod of column 2-norms (sanity companion)."""
    m = as_matrix(f)
    if not m.is_square:
        raise ValueError("the determinant bound applies to square matrices")
    n = m.n_rows
    lhs = abs(np.linalg.det(m.a))
    rhs = math.prod(p_norm(m.column(k), 2.0) for k in range(n))
    return RatioReport(
        lhs=lhs, rhs=rhs, ratio=_ratio(lhs, rhs), slack=rhs - lhs, n=n, k=n, p=2.0
    )


def check_subperm_bound(rows, k=None) -> RatioReport:
    """Quadratic sub-permanent functional against its column-norm bound."""
    a = _rows_array(rows)
    nrows, ncols = a.shape
    if k is not None and k != nrows:
        raise ValueError(f"K={k} does not match the {nrows} rows given")
    lhs = subperm_quadratic(a)
    rhs = subperm_bound_coefficient(ncols, nrows, 2.0) * math.prod(
        p_norm(a[j], 2.0) for j in range(nrows)
    )
    return RatioReport(
        lhs=lhs, rhs=rhs, ratio=_ratio(lhs, rhs), slack=rhs - lhs, n=ncols, k=nrows, p=2.0
    )


def check_subperm_p_bound(rows, p, k=None) -> RatioReport:
    """p-aggregated sub-permanent functional against its bound, 1 <= p <= 2.

    Also records the intermediate comparison lhs <= C(N,K)^(1/p - 1/2) *
    quadratic value as holder_slack.
    """
    p = validate_exponent(p, upper=2.0)
    a = _rows_array(rows)
    nrows, ncols = a.shape
    if k is not None and k != nrows:
        raise ValueError(f"K={k} does not match the {nrows} rows given")
    lhs = subperm_p(a, p)
    norms = math.prod(p_norm(a[j], 2.0) for j in range(nrows))
    rhs = subperm_bound_coefficient(ncols, nrows, p) * norms
    holder_rhs = math.comb(ncols, nrows) ** (1.0 / p - 0.5) * subperm_quadratic(a)
    return RatioReport(
        lhs=lhs,
        rhs=rhs,
        ratio=_ratio(lhs, rhs),
        slack=rhs - lhs,
        n=ncols,
        k=nrows,
        p=p,
        holder_slack=holder_rhs - lhs,
    )


def sharp_constant_lower(n: int, p) -> float:
    """Proven lower envelope max{1, N!/N^(N/p)} for the sharp constant."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = validate_exponent(p)
    return max(1.0, math.factorial(n) / n ** (n / p))


def sharp_constant_upper(n: int, p) -> float:
    """Proven upper envelope (N!/N^(N/2))^(2 - 2/p), for 1 <= p <= 2."""
    p = validate_exponent(p, upper=2.0)
    return permanent_bound_coefficient(n) ** (2.0 - 2.0 / p)


REPORT_CSV_COLUMNS = ("n", "k", "p", "lhs", "rhs", "ratio", "slack", "class")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def report_csv_header() -> str:
    return ",".join(REPORT_CSV_COLUMNS)


def report_csv_row(report: RatioReport) -> str:
    tag = report.equality_class.tag if report.equality_class is not None else ""
    cells = (
        _fmt(report.n),
        _fmt(report.k),
        _fmt(report.p),
        _fmt(report.lhs),
        _fmt(report.rhs),
        _fmt(report.ratio),
        _fmt(report.slack),
        tag,
    )
    return ",".join(cells)


def report_json_dict(report: RatioReport) -> dict:
    return {
        "n": report.n,
        "k": report.k,
        "p": report.p,
        "lhs": report.lhs,
        "rhs": report.rhs,
        "ratio": report.ratio,
        "slack": report.slack,
        "class": report.equality_class.tag if report.equality_class else None,
    }
