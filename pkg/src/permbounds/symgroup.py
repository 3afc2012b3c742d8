"""Discrete calculus on the symmetric group S_n and its heat flow.

Functions on S_n are dense arrays of length n! indexed by the
lexicographic (Lehmer) rank of the permutation's image array.  The
difference operators act by right multiplication with a transposition,

    D_{i,j} g(s) = g(s * (i j)) - g(s),

the Laplacian is 2 * sum_{i<j} (T_{i,j} - I), and exp(t * Laplacian) is
evaluated by uniformization: with P the mean of the n(n-1)/2
transposition shift operators and c = n(n-1), the Laplacian equals
c * (P - I) and the semigroup is the Poisson-weighted power series
sum_m e^{-ct} (ct)^m / m! * P^m, truncated at relative tail 1e-12.
P is doubly stochastic, so the series is unconditionally stable,
positivity-preserving, and integral-preserving.

A vector f on {0..n-1} lifts to S_n through the coordinate projection
pi_j (sigma -> sigma(j)).  The span of such single-coordinate functions
is invariant under the Laplacian: because sum_k u(sigma(k)) is constant
over the group,

    Laplacian(u o pi_j) = v o pi_j  with  v = 2n * (mean(u) - u),

so the lifted flow reduces to contraction of u toward its mean at the
single exponential rate 2n.  The reduced path implemented here is exact
(not an approximation) and the test suite validates it against the
brute-force semigroup on all n! elements before anything relies on it.

Column flows raise columns to the p-th power, run the semigroup, and
take the 1/p-th root; the product integral of a square nonnegative
matrix evolved this way starts at perm(F)/n! and tends to the product
of the normalized column p-norms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .matrices import ColumnMatrix, as_matrix, p_norm, validate_exponent
from .permanent import perm_fast

__all__ = [
    "MAX_DEGREE",
    "OPT_IN_DEGREE",
    "SymmetricGroup",
    "symmetric_group",
    "rank_permutation",
    "unrank_permutation",
    "GroupFunction",
    "constant_function",
    "lift_coordinate",
    "integrate",
    "transposition_difference",
    "laplacian",
    "gradient_squared",
    "heat_semigroup",
    "flow_column",
    "flow_product_integral",
    "flow_derivative_at_zero",
    "FlowTrace",
    "flow_trace",
    "default_time_grid",
    "circulant_ratio",
    "circulant_flow",
    "trace_csv_lines",
    "trace_json_dict",
]

OPT_IN_DEGREE = 6  # largest degree built without an explicit opt-in
MAX_DEGREE = 7  # hard ceiling for the dense n! representation

_GROUPS: dict[int, "SymmetricGroup"] = {}


@dataclass(frozen=True, eq=False)
class SymmetricGroup:
    """Precomputed tables for S_n: permutation list and transposition shifts.

    perms[r] is the image array of the rank-r permutation (lexicographic
    order); pair_tables[(i, j)][r] is the rank of perms[r] * (i j), i.e.
    of the image array with positions i and j swapped.
    """

    n: int
    perms: np.ndarray
    rank_of: dict
    pair_tables: dict

    @property
    def order(self) -> int:
        return self.perms.shape[0]


def symmetric_group(n: int, allow_large: bool = False) -> SymmetricGroup:
    """Cached table set for S_n (n <= 6; n = 7 requires allow_large=True)."""
    if n in _GROUPS:
        return _GROUPS[n]
    if not 1 <= n <= MAX_DEGREE:
        raise ValueError(f"dense group tables support 1 <= n <= {MAX_DEGREE}, got {n}")
    if n > OPT_IN_DEGREE and not allow_large:
        raise ValueError(
            f"n = {n} holds {math.factorial(n)} elements; pass allow_large=True to build it"
        )
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    rank_of = {tuple(row): r for r, row in enumerate(perms.tolist())}
    pair_tables = {}
    for i in range(n - 1):
        for j in range(i + 1, n):
            q = perms.copy()
            q[:, [i, j]] = q[:, [j, i]]
            pair_tables[(i, j)] = np.array(
                [rank_of[tuple(row)] for row in q.tolist()], dtype=np.intp
            )
    perms.setflags(write=False)
    for t in pair_tables.values():
        t.setflags(write=False)
    group = SymmetricGroup(n=n, perms=perms, rank_of=rank_of, pair_tables=pair_tables)
    _GROUPS[n] = group
    return group


def rank_permutation(images) -> int:
    """Lexicographic rank of a permutation of 0..n-1 (Lehmer code)."""
    s = list(images)
    n = len(s)
    if sorted(s) != list(range(n)):
        raise ValueError("not a permutation of 0..n-1")
    rank = 0
    for i in range(n):
        smaller = sum(1 for x in s[i + 1 :] if x < s[i])
        rank += smaller * math.factorial(n - 1 - i)
    return rank


def unrank_permutation(rank: int, n: int) -> tuple:
    """Inverse of rank_permutation: the rank-th permutation of 0..n-1."""
    if not 0 <= rank < math.factorial(n):
        raise ValueError("rank out of range")
    pool = list(range(n))
    out = []
    for i in range(n):
        f = math.factorial(n - 1 - i)
        idx, rank = divmod(rank, f)
        out.append(pool.pop(idx))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class GroupFunction:
    """A real- or complex-valued function on S_n, indexed by rank."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if not np.issubdtype(v.dtype, np.inexact):
            v = v.astype(float)
        if v.shape != (math.factorial(self.n),):
            raise ValueError(
                f"values must have length {self.n}! = {math.factorial(self.n)}"
            )
        if not np.isfinite(v).all():
            raise ValueError("values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def constant_function(n: int, c) -> GroupFunction:
    return GroupFunction(n, np.full(math.factorial(n), c))


def lift_coordinate(f, j: int) -> GroupFunction:
    """Lift a vector f on {0..n-1} to S_n via sigma -> f[sigma(j)]."""
    f = np.asarray(f)
    n = f.size
    if not 0 <= j < n:
        raise ValueError(f"coordinate j must lie in 0..{n - 1}")
    group = symmetric_group(n)
    return GroupFunction(n, f[group.perms[:, j]])


def integrate(g: GroupFunction):
    """Uniform average over the group."""
    mean = g.values.mean()
    return complex(mean) if np.iscomplexobj(g.values) else float(mean)


def transposition_difference(i: int, j: int, g: GroupFunction) -> GroupFunction:
    """D_{i,j} g: sigma -> g(sigma * (i j)) - g(sigma); integrates to zero."""
    if i == j:
        raise ValueError("transposition requires two distinct positions")
    group = symmetric_group(g.n)
    key = (min(i, j), max(i, j))
    if key not in group.pair_tables:
        raise ValueError(f"positions must lie in 0..{g.n - 1}")
    table = group.pair_tables[key]
    return GroupFunction(g.n, g.values[table] - g.values)


def laplacian(g: GroupFunction) -> GroupFunction:
    """2 * sum_{i<j} (g(sigma * (i j)) - g(sigma)); annihilates constants."""
    group = symmetric_group(g.n)
    acc = np.zeros_like(g.values)
    for table in group.pair_tables.values():
        acc = acc + (g.values[table] - g.values)
    return GroupFunction(g.n, 2.0 * acc)


def gradient_squared(g: GroupFunction) -> GroupFunction:
    """sum_{i<j} |D_{i,j} g|^2, a pointwise nonnegative function."""
    group = symmetric_group(g.n)
    acc = np.zeros(g.values.shape)
    for table in group.pair_tables.values():
        acc += np.abs(g.values[table] - g.values) ** 2
    return GroupFunction(g.n, acc)


def heat_semigroup(g: GroupFunction, t, rtol: float = 1e-12) -> GroupFunction:
    """exp(t * Laplacian) applied to g by Poisson-weighted powers.

    Preserves positivity and the integral; converges to the constant
    integrate(g) as t grows.  Rejects t < 0.
    """
    t = float(t)
    if not t >= 0.0:
        raise ValueError("the heat semigroup is defined for t >= 0")
    if t == 0.0 or g.n == 1:
        return g
    lam = g.n * (g.n - 1) * t
    if lam > 600.0:
        # split the interval so the Poisson series stays short and stable
        return heat_semigroup(heat_semigroup(g, t / 2.0, rtol), t / 2.0, rtol)
    group = symmetric_group(g.n)
    tables = list(group.pair_tables.values())
    npairs = len(tables)
    v = g.values.astype(complex if np.iscomplexobj(g.values) else float)
    weight = math.exp(-lam)
    acc = weight * v
    total = weight
    max_terms = int(lam + 40.0 * math.sqrt(lam + 1.0) + 60.0)
    for m in range(1, max_terms + 1):
        nxt = np.zeros_like(v)
        for table in tables:
            nxt += v[table]
        v = nxt / npairs
        weight *= lam / m
        acc += weight * v
        total += weight
        if total >= 1.0 - rtol:
            break
    return GroupFunction(g.n, acc / total)


def _nonneg_vector(f) -> np.ndarray:
    f = np.asarray(f, dtype=float).ravel()
    if f.size < 1:
        raise ValueError("empty vector")
    if not np.isfinite(f).all():
        raise ValueError("entries must be finite")
    if (f < 0).any():
        raise ValueError("entries must be nonnegative")
    return f


def _flow_column_any_t(f: np.ndarray, j: int, p: float, t: float, method: str):
    """Column flow without the t >= 0 guard (internal; used by finite
    differences around t = 0, where the reduced form extends smoothly)."""
    n = f.size
    up = f**p
    if method == "reduced":
        mean = up.mean()
        evolved = mean + math.exp(-2.0 * n * t) * (up - mean)
        return evolved ** (1.0 / p)
    if method == "brute":
        group = symmetric_group(n)
        lifted = lift_coordinate(up, j)
        evolved = heat_semigroup(lifted, t)
        out = np.zeros(n)
        np.add.at(out, group.perms[:, j], evolved.values)
        out *= n / group.order  # average over each fiber of pi_j
        return out ** (1.0 / p)
    raise ValueError(f"method must be 'reduced' or 'brute', got {method!r}")


def flow_column(f, j: int, p, t, method: str = "reduced") -> np.ndarray:
    """Evolve a nonnegative column: (exp(t*Laplacian) (f o pi_j)^p)^(1/p).

    The result again depends on sigma only through sigma(j) and is
    returned as a vector on {0..n-1}.  method='reduced' uses the exact
    mean-contraction form at rate 2n; method='brute' runs the dense
    semigroup (n <= 6) and exists to validate the reduced path.
    """
    f = _nonneg_vector(f)
    p = validate_exponent(p)
    if math.isinf(p):
        raise ValueError("column flow requires a finite exponent")
    if not 0 <= j < f.size:
        raise ValueError(f"coordinate j must lie in 0..{f.size - 1}")
    t = float(t)
    if not t >= 0.0:
        raise ValueError("the flow is defined for t >= 0")
    return _flow_column_any_t(f, j, p, t, method)


def _square_nonneg(f) -> np.ndarray:
    m = as_matrix(f)
    if not m.is_square:
        raise ValueError("square matrix required")
    a = m.a
    if np.abs(a.imag).max() != 0.0:
        raise ValueError("entries must be real and nonnegative")
    a = a.real
    if (a < 0).any():
        raise ValueError("entries must be real and nonnegative")
    return a


def _eta_any_t(a: np.ndarray, p: float, t: float, method: str) -> float:
    n = a.shape[0]
    evolved = np.column_stack(
        [_flow_column_any_t(a[:, j], j, p, t, method) for j in range(n)]
    )
    return float(perm_fast(evolved).real) / math.factorial(n)


def flow_product_integral(f, p, t, method: str = "reduced") -> float:
    """Product integral of the evolved columns: perm(F(t)) / n!.

    Starts at perm(F)/n! and tends to prod_j n^(-1/p) |f_j|_p; it is
    nondecreasing in t at p = 2.
    """
    a = _square_nonneg(f)
    p = validate_exponent(p)
    if math.isinf(p):
        raise ValueError("the product integral requires a finite exponent")
    t = float(t)
    if not t >= 0.0:
        raise ValueError("the flow is defined for t >= 0")
    return _eta_any_t(a, p, t, method)


def flow_derivative_at_zero(f) -> float:
    """d/dt at t = 0 of the p = 2 product integral, as a quadratic form.

    Evaluates the mean over the group of

        sum_{i<j} (q_ij - q_ji)^2 * rho,
        q_ij = f_j(sigma(i)) / f_j(sigma(j)),  rho = prod_k f_k(sigma(k)),

    which is nonnegative and vanishes exactly when every column is
    constant.  Requires strictly positive entries; callers holding zeros
    may pre-flow by a small time to regain positivity.
    """
    a = _square_nonneg(f)
    if (a <= 0).any():
        raise ValueError("strictly positive entries required")
    n = a.shape[0]
    group = symmetric_group(n)
    lifted = a[group.perms]  # lifted[s, i, k] = f_k(sigma_s(i))
    diag = lifted[:, np.arange(n), np.arange(n)]
    rho = diag.prod(axis=1)
    q = lifted / diag[:, None, :]
    anti = q - q.transpose(0, 2, 1)
    quad = 0.5 * (anti**2).sum(axis=(1, 2))
    return float((quad * rho).mean())


@dataclass(frozen=True, eq=False)
class FlowTrace:
    """Time-sampled record of a column flow.

    eta[i] is the product integral at times[i]; column_states[i] is the
    evolved matrix.  Circulant traces also carry the normalized path xy
    (leading entry scaled to 1) and the ratio phi along it.
    """

    p: float
    times: np.ndarray
    eta: np.ndarray
    column_states: np.ndarray
    xy: Optional[np.ndarray] = None
    phi: Optional[np.ndarray] = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.size < 1:
            raise ValueError("times must be a nonempty 1-d array")
        if (times < 0).any() or (np.diff(times) <= 0).any():
            raise ValueError("times must be strictly increasing and nonnegative")
        eta = np.asarray(self.eta, dtype=float)
        if eta.shape != times.shape or not np.isfinite(eta).all():
            raise ValueError("eta must be finite and match times")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "eta", eta)


def default_time_grid(n: int, t_min: float = 1e-3, t_max=None, points: int = 30):
    """Geometric grid of sample times, t_min up to t_max (default 5/n)."""
    if t_max is None:
        t_max = 5.0 / n
    t_min = float(t_min)
    t_max = float(t_max)
    if not (t_min > 0 and t_max > t_min):
        raise ValueError("need 0 < t_min < t_max")
    if points < 2:
        raise ValueError("need at least two grid points")
    return np.geomspace(t_min, t_max, points)


def flow_trace(f, p, times=None, method: str = "reduced") -> FlowTrace:
    """Sample the column flow of a square nonnegative matrix on a grid."""
    a = _square_nonneg(f)
    p = validate_exponent(p)
    n = a.shape[0]
    if times is None:
        times = default_time_grid(n)
    times = np.asarray(times, dtype=float)
    states = np.empty((times.size, n, n))
    etas = np.empty(times.size)
    for i, t in enumerate(times):
        if not t >= 0.0:
            raise ValueError("the flow is defined for t >= 0")
        states[i] = np.column_stack(
            [_flow_column_any_t(a[:, j], j, p, t, method) for j in range(n)]
        )
        etas[i] = float(perm_fast(states[i]).real) / math.factorial(n)
    return FlowTrace(p=p, times=times, eta=etas, column_states=states)


def circulant_ratio(x, y, p) -> float:
    """(1 + x^3 + y^3 + 3xy) / (1 + x^p + y^p)^(3/p) for x, y >= 0."""
    p = validate_exponent(p)
    x = float(x)
    y = float(y)
    if x < 0 or y < 0:
        raise ValueError("x and y must be nonnegative")
    num = 1.0 + x**3 + y**3 + 3.0 * x * y
    den = (1.0 + x**p + y**p) ** (3.0 / p)
    return num / den


def circulant_flow(x0, y0, p, times=None) -> FlowTrace:
    """Flow of the 3 x 3 circulant family, tracked as a path (x(t), y(t)).

    The reduced flow applies one scalar map entrywise (every column holds
    the same value multiset {1, x, y}), so the circulant shape is
    preserved exactly; normalizing the leading entry of the first column
    to 1 recovers the path, which tends to (1, 1).
    """
    p = validate_exponent(p)
    if math.isinf(p):
        raise ValueError("the flow requires a finite exponent")
    x0 = float(x0)
    y0 = float(y0)
    if x0 < 0 or y0 < 0:
        raise ValueError("x0 and y0 must be nonnegative")
    if times is None:
        times = default_time_grid(3)
    times = np.asarray(times, dtype=float)
    first = np.array([1.0, x0, y0])
    states = np.empty((times.size, 3, 3))
    etas = np.empty(times.size)
    phis = np.empty(times.size)
    xys = np.empty((times.size, 2))
    for i, t in enumerate(times):
        if not t >= 0.0:
            raise ValueError("the flow is defined for t >= 0")
        u = _flow_column_any_t(first, 0, p, t, "reduced")
        xt = u[1] / u[0]
        yt = u[2] / u[0]
        state = np.column_stack([u, u[[2, 0, 1]], u[[1, 2, 0]]])
        states[i] = state
        etas[i] = float(perm_fast(state).real) / 6.0
        phis[i] = circulant_ratio(xt, yt, p)
        xys[i] = (xt, yt)
    return FlowTrace(p=p, times=times, eta=etas, column_states=states, xy=xys, phi=phis)


def trace_csv_lines(trace: FlowTrace) -> list:
    """Render a FlowTrace as CSV lines: t, eta, [phi, x, y,] state cells."""
    n = trace.column_states.shape[1]
    k = trace.column_states.shape[2]
    header = ["t", "eta"]
    if trace.phi is not None:
        header += ["phi", "x", "y"]
    header += [f"s{r}{c}" for r in range(n) for c in range(k)]
    lines = [",".join(header)]
    for i in range(trace.times.size):
        cells = [repr(float(trace.times[i])), repr(float(trace.eta[i]))]
        if trace.phi is not None:
            cells += [
                repr(float(trace.phi[i])),
                repr(float(trace.xy[i, 0])),
                repr(float(trace.xy[i, 1])),
            ]
        cells += [repr(float(v)) for v in trace.column_states[i].ravel()]
        lines.append(",".join(cells))
    return lines


def trace_json_dict(trace: FlowTrace) -> dict:
    out = {
        "p": trace.p,
        "times": trace.times.tolist(),
        "eta": trace.eta.tolist(),
        "column_states": trace.column_states.tolist(),
    }
    if trace.phi is not None:
        out["phi"] = trace.phi.tolist()
        out["xy"] = trace.xy.tolist()
    return out
