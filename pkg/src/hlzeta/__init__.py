"""Two-variable extended Hurwitz-Lerch zeta function and its hypergeometric kernels."""

from .core import (
    DomainError,
    EvalPoint,
    EvalResult,
    HLZetaError,
    Method,
    NoConvergence,
    ParameterSet,
    PoleError,
    QuadConfig,
    QuadratureFailure,
    SeriesConfig,
    complex_power_neg_s,
    log_gamma,
    pochhammer,
)
from .dispatch import evaluate
from .hypfun import (
    eval_appell_f1,
    eval_humbert_phi1,
    eval_humbert_phi2,
    eval_humbert_phi3,
    eval_m4,
    eval_pfq,
    m4_closed_form,
)
from .oracle import TailBoundUnavailable, oracle_m4, oracle_phi
from .quad import (
    HumbertVariant,
    eval_phi_beta_integral_1d,
    eval_phi_beta_integral_2d,
    eval_phi_closed_kernel,
    eval_phi_integral_humbert,
    eval_phi_integral_m4,
)
from .verify import IdentityReport, run_suite
from .zeta import (
    LimitVariant,
    ReductionTag,
    classify_reduction,
    eval_choi_parmar,
    eval_classical_phi,
    eval_pathan_daman,
    eval_phi_diagonal,
    eval_phi_double_series,
    eval_phi_limit_case,
    summation_formula_lhs,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "EvalPoint",
    "EvalResult",
    "HLZetaError",
    "HumbertVariant",
    "IdentityReport",
    "LimitVariant",
    "Method",
    "NoConvergence",
    "ParameterSet",
    "PoleError",
    "QuadConfig",
    "QuadratureFailure",
    "ReductionTag",
    "SeriesConfig",
    "TailBoundUnavailable",
    "classify_reduction",
    "complex_power_neg_s",
    "eval_appell_f1",
    "eval_choi_parmar",
    "eval_classical_phi",
    "eval_humbert_phi1",
    "eval_humbert_phi2",
    "eval_humbert_phi3",
    "eval_m4",
    "eval_pathan_daman",
    "eval_pfq",
    "eval_phi_beta_integral_1d",
    "eval_phi_beta_integral_2d",
    "eval_phi_closed_kernel",
    "eval_phi_diagonal",
    "eval_phi_double_series",
    "eval_phi_integral_humbert",
    "eval_phi_integral_m4",
    "eval_phi_limit_case",
    "evaluate",
    "log_gamma",
    "m4_closed_form",
    "oracle_m4",
    "oracle_phi",
    "pochhammer",
    "run_suite",
    "summation_formula_lhs",
]
