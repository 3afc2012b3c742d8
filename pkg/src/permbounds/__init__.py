"""Sharp Hadamard-type bounds for matrix permanents and their supporting machinery.

The library is organised around one input object, a dense complex matrix
whose columns are the working vectors, and provides:

* exact permanent computation (Ryser fast path plus a brute-force oracle)
  and sub-permanent functionals over column subsets,
* bound evaluation with slack reporting and constructive classification
  of the equality cases,
* the discrete calculus of the random-transposition walk on the symmetric
  group: difference operators, Laplacian, heat semigroup, and the
  permanent-product functional evolved along it,
* multi-start estimation of the sharp constant C(p) and its proven
  lower/upper envelopes,
* a numerical log-convexity verifier for sharp constants of general
  multilinear forms over the reciprocal-exponent cube.
"""

from .matrices import (
    ColumnMatrix,
    as_matrix,
    p_norm,
    make_rank_one_constant_modulus,
    make_circulant3,
    random_matrix,
    matrix_to_json_dict,
    matrix_from_json_dict,
)
from .permanent import (
    perm_naive,
    perm_fast,
    perm_minor_gradient,
    subperm_quadratic,
    subperm_p,
)
from .bounds import (
    RANK_ONE_CONSTANT_MODULUS,
    STRICT,
    ZERO_COLUMN,
    EqualityClass,
    RatioReport,
    Witness,
    check_permanent_bound,
    check_determinant_bound,
    check_subperm_bound,
    check_subperm_p_bound,
    classify_equality,
    sharp_constant_lower,
    sharp_constant_upper,
)
from .symgroup import (
    GroupFunction,
    FlowTrace,
    SymmetricGroup,
    symmetric_group,
    rank_permutation,
    unrank_permutation,
    integrate,
    transposition_difference,
    laplacian,
    gradient_squared,
    heat_semigroup,
    flow_column,
    flow_product_integral,
    flow_derivative_at_zero,
    flow_trace,
    circulant_ratio,
    circulant_flow,
    default_time_grid,
)
from .optimize import (
    OptimizationConfig,
    OptimizationResult,
    ratio,
    estimate_sharp_constant,
    check_two_by_two_closed_form,
    sweep_exponents,
)
from .interpolation import (
    MultilinearForm,
    permanent_tensor,
    evaluate_form,
    norm_constant,
    logconvexity_check,
)

__version__ = "0.1.0"
