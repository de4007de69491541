"""s-numbers (approximation, Kolmogorov, Gelfand, scheme-relative and
symmetrized) of operators between finite-dimensional l_p spaces."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    EXACT, HEURISTIC, UPPER, Budget, Estimate, Exponent, Operator, SNumberError, Space,
    Subspace, adjoint, conjugate_exponent, dist_to_subspace, operator_norm,
    quotient_operator_norm, restricted_operator_norm, vector_norm,
)
from .schemes import (  # noqa: E402
    Scheme, SchemeLevel, check_scheme_axioms, gen_kolmogorov_op, gen_kolmogorov_set,
    q_compactness_profile, scheme_approx_number, scheme_duality_gap,
)
from .snumbers import (  # noqa: E402
    DualityReport, SNumberKind, SNumberSequence, approx_number, duality_gap,
    gelfand_number, kolmogorov_number, nuclear_norm_euclidean, snumber_sequence,
    svd_oracle, type_lp_diagnostic,
)
from .symmetrized import (  # noqa: E402
    FunctionalNet, VectorNet, build_functional_net, build_vector_net, embed_J, lift_Q,
    symmetrized_approx_number, tau_duality_gap,
)
from .zoo import (  # noqa: E402
    OperatorSpec, TruncationFamily, make_backward_shift, make_diagonal,
    make_injection_l1_linf, make_random, make_truncation_family,
)

__all__ = [
    "EXACT", "HEURISTIC", "UPPER", "Budget", "Estimate", "Exponent", "Operator", "SNumberError",
    "Space", "Subspace", "adjoint", "conjugate_exponent", "dist_to_subspace", "operator_norm",
    "quotient_operator_norm", "restricted_operator_norm", "vector_norm", "Scheme",
    "SchemeLevel", "check_scheme_axioms", "gen_kolmogorov_op", "gen_kolmogorov_set",
    "q_compactness_profile", "scheme_approx_number", "scheme_duality_gap", "DualityReport",
    "SNumberKind", "SNumberSequence", "approx_number", "duality_gap", "gelfand_number",
    "kolmogorov_number", "nuclear_norm_euclidean", "snumber_sequence", "svd_oracle",
    "type_lp_diagnostic", "FunctionalNet", "VectorNet", "build_functional_net",
    "build_vector_net", "embed_J", "lift_Q", "symmetrized_approx_number", "tau_duality_gap",
    "OperatorSpec", "TruncationFamily", "make_backward_shift", "make_diagonal",
    "make_injection_l1_linf", "make_random", "make_truncation_family",
]
