"""Multi-start projected ascent for the sharp permanent constant C(p).

C(p) is the supremum of |perm(F)| / prod_j |f_j|_p over matrices with no
zero column.  Replacing entries by their moduli never decreases the
ratio, so the search runs over entrywise-nonnegative matrices with unit
p-norm columns, where the objective is just the permanent.  Each
iteration projects the permanent's entrywise derivative (the minor
matrix) onto the tangent space of the product of p-spheres, takes a
backtracking step, clips negatives, and renormalizes.

Every run includes the two families known to be optimal at the
endpoints p = 1 (a permuted diagonal, value 1) and p = 2 (the constant
matrix, value N!/N^(N/2)) among its starts, so the reported value is
always at least max{1, N!/N^(N/p)}.  For 1 < p < 2 the true constant is
not known in closed form for N >= 3; the estimate is a certified lower
bound and is reported together with the proven bracket, never asserted
to be C(p) itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .bounds import RatioReport, _ratio, sharp_constant_lower, sharp_constant_upper
from .matrices import ColumnMatrix, as_matrix, p_norm, validate_exponent
from .permanent import perm_fast, perm_minor_gradient

__all__ = [
    "OptimizationConfig",
    "OptimizationResult",
    "ratio",
    "estimate_sharp_constant",
    "sweep_exponents",
    "check_two_by_two_closed_form",
    "SWEEP_CSV_COLUMNS",
    "sweep_csv_header",
    "sweep_csv_row",
]


@dataclass(frozen=True)
class OptimizationConfig:
    """Knobs for the multi-start ascent; defaults suit desk-scale runs."""

    num_starts: int = 8
    max_iters: int = 400
    step_init: float = 0.5
    step_shrink: float = 0.5
    tol: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if self.num_starts < 1:
            raise ValueError("num_starts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.step_init > 0:
            raise ValueError("step_init must be positive")
        if not 0.0 < self.step_shrink < 1.0:
            raise ValueError("step_shrink must lie in (0, 1)")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    """Outcome of one estimate: the best ratio found and its context.

    bound_gap_lower = best_ratio - max{1, N!/N^(N/p)} (>= -tol always,
    since the explicit candidate families are among the starts);
    bound_gap_upper = upper envelope - best_ratio (NaN when p > 2, where
    the envelope formula does not apply).  history records the accepted
    objective values of the winning start, which are nondecreasing.
    """

    n: int
    p: float
    best_ratio: float
    best_matrix: ColumnMatrix
    starts_converged_to_best: int
    iterations: int
    bound_gap_lower: float
    bound_gap_upper: float
    history: Tuple[float, ...] = ()


def ratio(f, p) -> float:
    """|perm(F)| / prod_j |f_j|_p; rejects matrices with a zero column."""
    m = as_matrix(f)
    if not m.is_square:
        raise ValueError("the ratio is defined for square matrices")
    p = validate_exponent(p)
    norms = [p_norm(m.column(k), p) for k in range(m.n_cols)]
    if min(norms) == 0.0:
        raise ValueError("zero column: the ratio is undefined")
    return abs(perm_fast(m)) / math.prod(norms)


def _normalize_columns(a: np.ndarray, p: float) -> np.ndarray:
    norms = (a**p).sum(axis=0) ** (1.0 / p)
    return a / norms


def _ascend(a0: np.ndarray, p: float, cfg: OptimizationConfig):
    """Projected ascent from one nonnegative start; returns
    (value, matrix, iterations, accepted-value history)."""
    a = _normalize_columns(np.maximum(np.asarray(a0, dtype=float), 0.0), p)
    value = perm_fast(a).real
    history = [value]
    iters = 0
    for _ in range(cfg.max_iters):
        iters += 1
        grad = perm_minor_gradient(a)
        normal = a ** (p - 1.0)
        coef = (grad * normal).sum(axis=0) / (normal * normal).sum(axis=0)
        direction = grad - normal * coef
        if np.abs(direction).max() < cfg.tol:
            break
        step = cfg.step_init
        accepted = False
        while step > 1e-16:
            cand = a + step * direction
            np.maximum(cand, 0.0, out=cand)
            cand = _normalize_columns(cand, p)
            cand_value = perm_fast(cand).real
            if cand_value > value:
                rel_gain = (cand_value - value) / max(value, 1e-300)
                a, value = cand, cand_value
                history.append(value)
                accepted = True
                break
            step *= cfg.step_shrink
        if not accepted:
            break
        if rel_gain < cfg.tol:
            break
    return value, a, iters, history


def estimate_sharp_constant(
    n: int, p, config: Optional[OptimizationConfig] = None
) -> OptimizationResult:
    """Multi-start lower estimate of C(p) for N x N matrices.

    Deterministic given config.seed.  Starts: the identity (a permuted
    diagonal), the all-ones matrix, and config.num_starts seeded random
    nonnegative matrices.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    p = validate_exponent(p)
    if math.isinf(p):
        raise ValueError("the estimate requires a finite exponent")
    cfg = config if config is not None else OptimizationConfig()
    rng = np.random.default_rng(cfg.seed)
    starts = [np.eye(n), np.ones((n, n))]
    starts += [rng.random((n, n)) for _ in range(cfg.num_starts)]
    best_value = -math.inf
    best_matrix = None
    best_iters = 0
    best_history: Tuple[float, ...] = ()
    finals = []
    for a0 in starts:
        value, a, iters, history = _ascend(a0, p, cfg)
        finals.append(value)
        if value > best_value:
            best_value, best_matrix, best_iters = value, a, iters
            best_history = tuple(history)
    near = sum(1 for v in finals if v >= best_value - 1e-7 * max(1.0, best_value))
    lower = sharp_constant_lower(n, p)
    upper = sharp_constant_upper(n, p) if p <= 2.0 else math.nan
    return OptimizationResult(
        n=n,
        p=p,
        best_ratio=best_value,
        best_matrix=ColumnMatrix(best_matrix),
        starts_converged_to_best=near,
        iterations=best_iters,
        bound_gap_lower=best_value - lower,
        bound_gap_upper=upper - best_value if p <= 2.0 else math.nan,
        history=best_history,
    )


def sweep_exponents(n: int, p_grid, config: Optional[OptimizationConfig] = None):
    """Run estimate_sharp_constant across a grid of exponents in [1, 2]."""
    results = []
    for p in p_grid:
        p = validate_exponent(p, upper=2.0)
        results.append(estimate_sharp_constant(n, p, config))
    return results


def check_two_by_two_closed_form(x, y, p) -> RatioReport:
    """1 + xy against (1 + x^p)^(1/p) * (1 + y^p)^(1/p) for x, y >= 0.

    This is the 2 x 2 ratio with columns (1, x) and (y, 1); the
    inequality holds for 1 <= p <= 2, with equality only at x = y = 1
    when p = 2 and only at x = y = 0 when p < 2.
    """
    x = float(x)
    y = float(y)
    if x < 0 or y < 0:
        raise ValueError("x and y must be nonnegative")
    p = validate_exponent(p, upper=2.0)
    lhs = 1.0 + x * y
    rhs = (1.0 + x**p) ** (1.0 / p) * (1.0 + y**p) ** (1.0 / p)
    return RatioReport(
        lhs=lhs, rhs=rhs, ratio=_ratio(lhs, rhs), slack=rhs - lhs, n=2, k=2, p=p
    )


SWEEP_CSV_COLUMNS = (
    "n",
    "p",
    "best_ratio",
    "lower_bound",
    "upper_bound",
    "conjecture_gap",
    "starts_to_best",
    "iters",
)


def sweep_csv_header() -> str:
    return ",".join(SWEEP_CSV_COLUMNS)


def sweep_csv_row(result: OptimizationResult) -> str:
    lower = sharp_constant_lower(result.n, result.p)
    upper = sharp_constant_upper(result.n, result.p)
    cells = (
        str(result.n),
        repr(float(result.p)),
        repr(float(result.best_ratio)),
        repr(float(lower)),
        repr(float(upper)),
        repr(float(result.best_ratio - lower)),
        str(result.starts_converged_to_best),
        str(result.iterations),
    )
    return ",".join(cells)
