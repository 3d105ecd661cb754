"""Method selection for a single evaluation of Phi.

``evaluate`` is the one entry point used by the command line: it maps a
method name to the evaluator, checks that method's validity region before
calling it, and in ``auto`` mode picks the cheapest representation whose
region contains the point.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    DomainError,
    EvalPoint,
    EvalResult,
    Method,
    ParameterSet,
    QuadConfig,
    SeriesConfig,
    complex_power_neg_s,
)
from .quad import (
    closed_kernel_order,
    eval_phi_beta_integral_1d,
    eval_phi_closed_kernel,
    eval_phi_integral_m4,
)
from .zeta import (
    ReductionTag,
    boundary_margin,
    classify_reduction,
    eval_phi_diagonal,
    eval_phi_double_series,
    series_shape,
)

METHODS = ("auto", "series", "diagonal", "quad-m4", "quad-beta", "closed-kernel")
SERIES_METHODS = ("series", "diagonal")
QUAD_METHODS = ("quad-m4", "quad-beta", "closed-kernel")
DEFAULT_SERIES_TOL = 1e-10
DEFAULT_QUAD_TOL = 1e-8


@dataclass
class Evaluation:
    """An :class:`EvalResult` together with the dispatch decision behind it."""

    result: EvalResult
    method: str
    reduction: ReductionTag


def default_tol(method: str) -> float:
    return DEFAULT_QUAD_TOL if method in QUAD_METHODS else DEFAULT_SERIES_TOL


def _require_mellin(pt: EvalPoint) -> None:
    if not (pt.s.real > 0 and pt.a.real > 0):
        raise DomainError("integral representations need Re(s) > 0 and Re(a) > 0")


def _require_interior(pt: EvalPoint) -> None:
    if not pt.interior:
        raise DomainError("this method needs |z| < 1 and |t| < 1")


def closed_kernel_applies(p: ParameterSet) -> bool:
    return p.mu == p.nu and p.delta == p.xi and p.delta_p == p.xi_p


def check_preconditions(method: str, p: ParameterSet, pt: EvalPoint) -> None:
    """Raise :class:`DomainError` unless ``method`` is valid at ``(p, pt)``."""
    if method == "series":
        boundary_margin(series_shape(p), pt)
    elif method == "diagonal":
        if pt.z == 0:
            raise DomainError("diagonal representation needs z != 0")
        boundary_margin(series_shape(p), pt)
    elif method == "quad-m4":
        _require_interior(pt)
        _require_mellin(pt)
    elif method == "quad-beta":
        _require_interior(pt)
        if not (p.nu.real > p.mu.real > 0):
            raise DomainError("beta representation needs Re(nu) > Re(mu) > 0")
    elif method == "closed-kernel":
        if not closed_kernel_applies(p):
            raise DomainError("closed kernel needs mu = nu, delta = xi, delta' = xi'")
        _require_mellin(pt)
        if abs(pt.z) > 1 or abs(pt.t) > 1:
            raise DomainError("closed kernel needs |z| <= 1 and |t| <= 1")
        if (abs(pt.z) == 1 and pt.z != 1) or (abs(pt.t) == 1 and pt.t != 1):
            raise DomainError("closed kernel on the unit circle is supported only at z = 1 or t = 1")
        if closed_kernel_order(p.eta, p.eta_p, pt) <= 0:
            raise DomainError("closed kernel integrand is not integrable at x = 0")
    else:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


def _eligible(method: str, p: ParameterSet, pt: EvalPoint) -> bool:
    try:
        check_preconditions(method, p, pt)
    except DomainError:
        return False
    return True


def select_method(p: ParameterSet, pt: EvalPoint) -> str:
    """The ``auto`` choice: closed kernel, then diagonal, then double series."""
    for method in ("closed-kernel", "diagonal"):
        if _eligible(method, p, pt):
            return method
    return "series"


def evaluate(
    p: ParameterSet,
    pt: EvalPoint,
    method: str = "auto",
    tol: float | None = None,
    series_cfg: SeriesConfig | None = None,
    quad_cfg: QuadConfig | None = None,
) -> Evaluation:
    """Evaluate Phi at ``(p, pt)`` with the requested or automatically chosen method.

    Parameters
    ----------
    method
        One of :data:`METHODS`.
    tol
        Overrides the tolerance of both configs.  Defaults to 1e-10 for the
        series methods and for ``auto``, 1e-8 for the quadrature methods.
    series_cfg, quad_cfg
        Base configurations; ``series_cfg`` defaults to
        :meth:`SeriesConfig.from_env`.

    Raises
    ------
    DomainError
        The point lies outside the chosen method's region.
    NoConvergence, QuadratureFailure
        Propagated from the evaluator.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    tag = classify_reduction(p, pt)
    if tol is None:
        tol = default_tol(method)
    scfg = series_cfg or SeriesConfig.from_env()
    scfg = SeriesConfig(tol=tol, max_diagonal=scfg.max_diagonal, stall_count=scfg.stall_count)
    qbase = quad_cfg or QuadConfig()
    qcfg = QuadConfig(tol=tol, max_levels=qbase.max_levels, tail_cut=qbase.tail_cut)

    if method == "auto":
        if tag is ReductionTag.PowerLaw:
            res = EvalResult(complex_power_neg_s(pt.a, pt.s), 0.0, 1, Method.Dispatch, True)
            return Evaluation(res, "auto", tag)
        chosen = select_method(p, pt)
    else:
        chosen = method
    check_preconditions(chosen, p, pt)

    if chosen == "series":
        res = eval_phi_double_series(p, pt, scfg)
    elif chosen == "diagonal":
        res = eval_phi_diagonal(p, pt, scfg)
    elif chosen == "quad-m4":
        res = eval_phi_integral_m4(p, pt, qcfg, scfg)
    elif chosen == "quad-beta":
        res = eval_phi_beta_integral_1d(p, pt, qcfg, scfg)
    else:
        res = eval_phi_closed_kernel(p.eta, p.eta_p, pt, qcfg)
    return Evaluation(res, chosen, tag)


__all__ = [
    "DEFAULT_QUAD_TOL",
    "DEFAULT_SERIES_TOL",
    "METHODS",
    "Evaluation",
    "check_preconditions",
    "closed_kernel_applies",
    "default_tol",
    "evaluate",
    "select_method",
]
