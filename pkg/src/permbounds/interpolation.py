"""Log-convexity verification for sharp constants of multilinear forms.

A MultilinearForm is a dense coefficient tensor J over {0..N-1}^M acting
on M vectors.  Its sharp constant for exponents p_1..p_M,

    C = sup |J(f_1, ..., f_M)| / prod_j |f_j|_{p_j},

is parameterized here by the reciprocals 1/p_j in [0, 1] (0 meaning the
max-norm), and ln C is a convex function of that reciprocal vector.
``norm_constant`` produces a deterministic lower estimate by cyclic
block ascent: with all other arguments frozen the form is linear in
f_k, so the optimal f_k on its p-sphere is the Hoelder-dual vector of
the coefficient contraction and the blockwise update is exactly optimal
(the objective never decreases).  ``logconvexity_check`` then tests the
segment inequality C(t*q + (1-t)*r) <= C(q)^t * C(r)^(1-t); since all
three quantities are lower estimates, only a midpoint estimate exceeding
the endpoint bound beyond the one-sided tolerance counts as a certified
violation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .matrices import p_norm
from .optimize import OptimizationConfig

__all__ = [
    "MultilinearForm",
    "permanent_tensor",
    "evaluate_form",
    "holder_norm",
    "norm_constant",
    "LogConvexityPoint",
    "LogConvexityReport",
    "logconvexity_check",
    "LOGCONVEXITY_RTOL",
    "logconvexity_csv_header",
    "logconvexity_csv_rows",
]

LOGCONVEXITY_RTOL = 1e-4


@dataclass(frozen=True, eq=False)
class MultilinearForm:
    """Dense coefficient tensor of arity m over vectors of length n."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim < 1:
            raise ValueError("coefficient tensor must have arity >= 1")
        n = c.shape[0]
        if any(s != n for s in c.shape):
            raise ValueError("coefficient tensor must be a hypercube")
        if not np.isfinite(c).all():
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def m(self) -> int:
        return self.coeffs.ndim

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]


def permanent_tensor(n: int) -> MultilinearForm:
    """Indicator tensor of permutation tuples: J(f_1..f_n) = perm([f_1..f_n])."""
    if not 1 <= n <= 6:
        raise ValueError("the dense permanent tensor is supported for 1 <= n <= 6")
    coeffs = np.zeros((n,) * n)
    for sigma in itertools.permutations(range(n)):
        coeffs[sigma] = 1.0
    return MultilinearForm(coeffs)


def _check_vectors(form: MultilinearForm, vectors):
    if len(vectors) != form.m:
        raise ValueError(f"form has arity {form.m}, got {len(vectors)} vectors")
    out = []
    for v in vectors:
        v = np.asarray(v, dtype=complex).ravel()
        if v.size != form.n:
            raise ValueError(f"vectors must have length {form.n}")
        out.append(v)
    return out


def evaluate_form(form: MultilinearForm, vectors) -> complex:
    """sum_k J[k_1..k_m] * prod_j vectors[j][k_j]."""
    vs = _check_vectors(form, vectors)
    t = form.coeffs
    for v in vs:
        t = np.tensordot(t, v, axes=(0, 0))
    return complex(t)


def _partial_contraction(form: MultilinearForm, vectors, k: int) -> np.ndarray:
    """Gradient vector in slot k: the form contracted with all others."""
    t = np.moveaxis(form.coeffs, k, 0)
    for j in range(form.m):
        if j == k:
            continue
        t = np.tensordot(t, vectors[j], axes=(1, 0))
    return t


def holder_norm(v, recip) -> float:
    """|v|_p with reciprocal exponent 1/p = recip in [0, 1]; 0 is max-norm."""
    recip = float(recip)
    if not 0.0 <= recip <= 1.0:
        raise ValueError("reciprocal exponent must lie in [0, 1]")
    if recip == 0.0:
        return p_norm(v, math.inf)
    return p_norm(v, 1.0 / recip)


def _dual_update(g: np.ndarray, recip: float):
    """Unit-p-norm vector maximizing Re<g, f> and the value it attains.

    The maximum equals the dual-norm |g|_q (1/q = 1 - recip); equality
    needs the phases conjugate-aligned and |f_i|^p proportional to
    |g_i|^q.  Returns (None, 0.0) when g vanishes.  Entries more than
    250 orders of magnitude below the largest are treated as zero so the
    phase division never touches subnormals.
    """
    mag = np.abs(g)
    top = mag.max()
    if not top > 1e-300:
        return None, 0.0
    scaled_mag = mag / top
    safe = scaled_mag > 1e-250
    phase = np.where(safe, np.conj(g / top) / np.where(safe, scaled_mag, 1.0), 1.0)
    if recip == 0.0:  # max-norm ball: every entry saturates
        return phase, float(mag.sum())
    if recip == 1.0:  # 1-norm ball: a single vertex carries all mass
        i = int(np.argmax(mag))
        f = np.zeros_like(g)
        f[i] = phase[i]
        return f, float(top)
    q = 1.0 / (1.0 - recip)
    dual = p_norm(g, q)
    f = phase * (mag / dual) ** (recip / (1.0 - recip))
    return f, float(dual)


def norm_constant(
    form: MultilinearForm, pvec, config: Optional[OptimizationConfig] = None
) -> float:
    """Deterministic lower estimate of the sharp constant at pvec.

    pvec lists the reciprocal exponents 1/p_j in [0, 1].  Multi-start
    (all-ones plus config.num_starts seeded complex starts) cyclic block
    ascent; each block update is exactly optimal, so the objective is
    nondecreasing and the best value over starts is returned.
    """
    recips = [float(r) for r in pvec]
    if len(recips) != form.m:
        raise ValueError(f"form has arity {form.m}, got {len(recips)} exponents")
    if any(not 0.0 <= r <= 1.0 for r in recips):
        raise ValueError("reciprocal exponents must lie in [0, 1]")
    cfg = config if config is not None else OptimizationConfig()
    rng = np.random.default_rng(cfg.seed)
    starts = [[np.ones(form.n, dtype=complex) for _ in range(form.m)]]
    for _ in range(cfg.num_starts):
        starts.append(
            [
                rng.standard_normal(form.n) + 1j * rng.standard_normal(form.n)
                for _ in range(form.m)
            ]
        )
    best = 0.0
    for vectors in starts:
        vectors = [v / holder_norm(v, r) for v, r in zip(vectors, recips)]
        value = abs(evaluate_form(form, vectors))
        for _ in range(cfg.max_iters):
            previous = value
            for k in range(form.m):
                g = _partial_contraction(form, vectors, k)
                f, v = _dual_update(g, recips[k])
                if f is None:
                    continue
                vectors[k] = f
                value = v
            if value - previous <= cfg.tol * max(previous, 1.0):
                break
        best = max(best, value)
    return float(best)


@dataclass(frozen=True, eq=False)
class LogConvexityPoint:
    """One interior point of a segment check."""

    t: float
    pvec: Tuple[float, ...]
    midpoint_estimate: float
    endpoint_bound: float
    relative_excess: float
    violation: bool


@dataclass(frozen=True, eq=False)
class LogConvexityReport:
    """Segment check outcome: endpoint estimates and per-point verdicts."""

    q_value: float
    r_value: float
    points: Tuple[LogConvexityPoint, ...]
    passed: bool
    max_relative_excess: float


def logconvexity_check(
    form: MultilinearForm,
    qvec,
    rvec,
    t_grid=None,
    config: Optional[OptimizationConfig] = None,
    rtol: float = LOGCONVEXITY_RTOL,
) -> LogConvexityReport:
    """Test C(t*q + (1-t)*r) <= C(q)^t * C(r)^(1-t) along a segment.

    All three constants are lower estimates, so only the midpoint
    estimate exceeding the endpoint-derived bound by more than rtol
    (relative, one-sided) is flagged; every interior estimate remains a
    certified lower bound at its own exponent vector.
    """
    qv = np.asarray([float(x) for x in qvec])
    rv = np.asarray([float(x) for x in rvec])
    if qv.size != form.m or rv.size != form.m:
        raise ValueError("qvec and rvec must match the form arity")
    if t_grid is None:
        t_grid = np.linspace(0.0, 1.0, 7)[1:-1]
    t_grid = np.asarray(t_grid, dtype=float)
    if ((t_grid <= 0.0) | (t_grid >= 1.0)).any():
        raise ValueError("t_grid must lie strictly inside (0, 1)")
    cq = norm_constant(form, qv, config)
    cr = norm_constant(form, rv, config)
    points = []
    worst = -math.inf
    for t in t_grid:
        pv = t * qv + (1.0 - t) * rv
        mid = norm_constant(form, pv, config)
        bound = cq**t * cr ** (1.0 - t)
        if bound > 0.0:
            excess = mid / bound - 1.0
        else:
            excess = 0.0 if mid == 0.0 else math.inf
        worst = max(worst, excess)
        points.append(
            LogConvexityPoint(
                t=float(t),
                pvec=tuple(float(x) for x in pv),
                midpoint_estimate=mid,
                endpoint_bound=float(bound),
                relative_excess=float(excess),
                violation=bool(excess > rtol),
            )
        )
    return LogConvexityReport(
        q_value=cq,
        r_value=cr,
        points=tuple(points),
        passed=not any(pt.violation for pt in points),
        max_relative_excess=float(worst),
    )


def logconvexity_csv_header(m: int) -> str:
    pcols = ",".join(f"pv{j}" for j in range(m))
    return f"t,{pcols},midpoint_estimate,endpoint_bound,violation"


def logconvexity_csv_rows(report: LogConvexityReport) -> list:
    rows = []
    for pt in report.points:
        cells = [repr(pt.t)]
        cells += [repr(x) for x in pt.pvec]
        cells += [
            repr(pt.midpoint_estimate),
            repr(pt.endpoint_bound),
            "1" if pt.violation else "0",
        ]
        rows.append(",".join(cells))
    return rows
