"""Cross-representation identity suite.

Each identity family pairs two independent evaluations of the same quantity
(series against quadrature, diagonal against double series, a summation
formula against a shifted evaluation, ...) over a seeded parameter grid.
Sampling happens up front and in a fixed order, so a run is a deterministic
function of ``(grid, seed, tol)`` regardless of how many worker threads
evaluate the cases.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import (
    EvalPoint,
    HLZetaError,
    NoConvergence,
    ParameterSet,
    QuadConfig,
    QuadratureFailure,
    SeriesConfig,
    complex_power_neg_s,
)
from .hypfun import eval_m4, m4_closed_form, pfq_sum
from .quad import (
    HumbertVariant,
    eval_phi_beta_integral_1d,
    eval_phi_beta_integral_2d,
    eval_phi_closed_kernel,
    eval_phi_integral_humbert,
    eval_phi_integral_m4,
)
from .zeta import (
    LimitVariant,
    eval_choi_parmar,
    eval_pathan_daman,
    eval_phi_diagonal,
    eval_phi_double_series,
    eval_phi_limit_case,
    summation_formula_lhs,
)

GRIDS = ("small", "full")
NUM_RANGE = (0.5, 3.0)
DEN_RANGE = (1.0, 4.0)
ARG_RANGE = (0.1, 0.6)
S_RANGE = (1.0, 3.0)
A_RANGE = (0.5, 2.5)

_TIGHT = SeriesConfig(tol=1e-15)
_QUAD = QuadConfig(tol=1e-10)


@dataclass
class IdentityReport:
    """Outcome of one identity at one point; ``passed`` iff ``abs_diff <= tolerance``."""

    identity: str
    description: str
    point: dict
    lhs: complex | None
    rhs: complex | None
    abs_diff: float | None
    tolerance: float
    passed: bool
    error: str | None = None
    converged: bool = True


@dataclass
class IdentityCase:
    identity: str
    description: str
    point: dict
    compute: Callable[[], tuple[complex, complex]]
    tol: float
    relative: bool = True


@dataclass
class Family:
    identity: str
    description: str
    build: Callable[[np.random.Generator, str], list[IdentityCase]]
    sizes: dict = field(default_factory=lambda: {"small": 3, "full": 12})


# --- sampling -----------------------------------------------------------------

def _u(rng: np.random.Generator, lo_hi: tuple[float, float]) -> float:
    return float(rng.uniform(*lo_hi))


def _arg(rng: np.random.Generator) -> float:
    return _u(rng, ARG_RANGE) * (1.0 if rng.random() < 0.75 else -1.0)


def sample_parameters(rng: np.random.Generator) -> ParameterSet:
    num = [_u(rng, NUM_RANGE) for _ in range(5)]
    den = [_u(rng, DEN_RANGE) for _ in range(3)]
    return ParameterSet(*num, *den)


def sample_point(rng: np.random.Generator) -> EvalPoint:
    return EvalPoint(_arg(rng), _arg(rng), _u(rng, S_RANGE), _u(rng, A_RANGE))


def sample_beta_parameters(rng: np.random.Generator) -> ParameterSet:
    p = sample_parameters(rng)
    nu = float(rng.uniform(max(DEN_RANGE[0], p.mu.real + 0.5), DEN_RANGE[1] + p.mu.real))
    return ParameterSet(p.mu, p.eta, p.eta_p, p.delta, p.delta_p, nu, p.xi, p.xi_p)


def _collapsed(p: ParameterSet, mu_eq_nu: bool) -> ParameterSet:
    mu = p.nu if mu_eq_nu else p.mu
    return ParameterSet(mu, p.eta, p.eta_p, p.xi, p.xi_p, p.nu, p.xi, p.xi_p)


def _point_dict(p: ParameterSet | None, pt: EvalPoint | None, **extra) -> dict:
    out: dict = {}
    if p is not None:
        out.update(p.as_dict())
    if pt is not None:
        out.update(z=pt.z, t=pt.t, s=pt.s, a=pt.a)
    out.update(extra)
    return out


def _series(p: ParameterSet, pt: EvalPoint) -> complex:
    return eval_phi_double_series(p, pt, _TIGHT).value


# --- families -----------------------------------------------------------------

def _m4_closed_form(rng, grid):
    cases = []
    mods = (0.1, 0.3, 0.5, 0.7)
    etas = (0.5, 1.0, 2.5)
    combos = [(0.5, 0.25, 1.0, 2.0)]
    full = [(x, y, e, ep) for x in mods for y in mods for e in etas for ep in etas]
    if grid == "full":
        combos += full
    else:
        idx = rng.choice(len(full), size=3, replace=False)
        combos += [full[i] for i in sorted(idx)]
    for x, y, eta, eta_p in combos:
        base = sample_parameters(rng)
        p = ParameterSet(base.nu, eta, eta_p, base.xi, base.xi_p, base.nu, base.xi, base.xi_p)
        cases.append(IdentityCase(
            "eq17-m4-closed-form", "M4 with mu=nu, delta=xi, delta'=xi' against (1-x)^-eta (1-y)^-eta'",
            _point_dict(p, None, x=x, y=y),
            lambda p=p, x=x, y=y: (eval_m4(p, x, y, _TIGHT).value, m4_closed_form(p.eta, p.eta_p, x, y)),
            1e-11,
        ))
    return cases


def _thm1(rng, grid):
    n = 3 if grid == "small" else 10
    cases = []
    for _ in range(n):
        p, pt = sample_parameters(rng), sample_point(rng)
        cases.append(IdentityCase(
            "thm1-m4-vs-series", "Mellin integral with M4 kernel against the double series",
            _point_dict(p, pt),
            lambda p=p, pt=pt: (eval_phi_integral_m4(p, pt, _QUAD).value, _series(p, pt)),
            1e-8,
        ))
    return cases


def _thm2(rng, grid):
    n1, n2 = (2, 1) if grid == "small" else (5, 5)
    cases = []
    for _ in range(n1):
        p, pt = sample_beta_parameters(rng), sample_point(rng)
        cases.append(IdentityCase(
            "thm2-beta-1d", "beta-kernel single integral against the double series",
            _point_dict(p, pt),
            lambda p=p, pt=pt: (eval_phi_beta_integral_1d(p, pt, QuadConfig(tol=1e-9)).value, _series(p, pt)),
            1e-7,
        ))
    for _ in range(n2):
        p, pt = sample_beta_parameters(rng), sample_point(rng)
        cases.append(IdentityCase(
            "thm2-beta-2d", "beta-kernel double integral against the double series",
            _point_dict(p, pt),
            lambda p=p, pt=pt: (eval_phi_beta_integral_2d(p, pt, QuadConfig(tol=1e-8)).value, _series(p, pt)),
            1e-6,
        ))
    return cases


def _cor3(rng, grid):
    n = 1 if grid == "small" else 3
    cases = []
    for _ in range(n):
        b = sample_beta_parameters(rng)
        p = ParameterSet(b.mu, b.eta, b.eta_p, 1, 1, b.nu, 1, 1)
        pt = sample_point(rng)
        cases.append(IdentityCase(
            "cor3-beta-binomial", "double integral with binomial kernels (delta=delta'=xi=xi'=1)",
            _point_dict(p, pt),
            lambda p=p, pt=pt: (eval_phi_beta_integral_2d(p, pt, QuadConfig(tol=1e-8)).value, _series(p, pt)),
            1e-6,
        ))
    return cases


def _thm4(rng, grid):
    n = 2 if grid == "small" else 6
    cases = []
    for i in range(n):
        p, pt = sample_parameters(rng), sample_point(rng)
        # first case of every run checks the x = 0 row
        ratio = 0.0 if i == 0 else float(rng.uniform(-0.5, 0.5))
        x = ratio * pt.a.real
        cases.append(IdentityCase(
            "thm4-summation", "sum_r (s)_r/r! Phi(s+r, a) x^r against Phi(s, a-x), r <= 60",
            _point_dict(p, pt, x=x, r_max=60),
            lambda p=p, pt=pt, x=x: (
                summation_formula_lhs(p, pt, x, 60, _TIGHT).value,
                _series(p, EvalPoint(pt.z, pt.t, pt.s, pt.a - x)),
            ),
            1e-8,
        ))
    return cases


def _thm5(rng, grid):
    n = 3 if grid == "small" else 20
    cases = []
    for i in range(n):
        p, pt = sample_parameters(rng), sample_point(rng)
        cases.append(IdentityCase(
            "thm5-diagonal", "outer-k series with finite inner sum against the double series",
            _point_dict(p, pt),
            lambda p=p, pt=pt: (eval_phi_diagonal(p, pt, _TIGHT).value, _series(p, pt)),
            1e-10,
        ))
        if i % 3 == 0:
            cases.append(IdentityCase(
                "thm5-hypergeometric-form", "outer-k series with terminating 4F3 inner sums against the double series",
                _point_dict(p, pt),
                lambda p=p, pt=pt: (eval_phi_diagonal(p, pt, _TIGHT, inner="pfq").value, _series(p, pt)),
                1e-10,
            ))
    return cases


def reduced_outer_series(p: ParameterSet, pt: EvalPoint, form: str, tol: float = 1e-16, cap: int = 5000) -> complex:
    """Outer-k series with the reduced terminating inner functions.

    ``form="3f2"`` (``delta = xi``)::

        sum_k (mu)_k (eta)_k z^k / ((nu)_k (k+a)^s k!) 3F2(eta', delta', -k; xi', 1-eta-k; t/z)

    ``form="2f1"`` (``nu = eta``, ``delta = xi``, ``delta' = xi'``)::

        sum_k (mu)_k z^k / ((k+a)^s k!) 2F1(eta', -k; 1-eta-k; t/z)
    """
    if pt.z == 0:
        raise ValueError("reduced outer series needs z != 0")
    ratio = pt.t / pt.z
    inner_cfg = SeriesConfig(tol=1e-17, max_diagonal=cap + 1)
    total = 0j
    outer = 1 + 0j
    small = 0
    for k in range(cap):
        if form == "3f2":
            inner = pfq_sum([p.eta_p, p.delta_p, -k], [p.xi_p, 1 - p.eta - k], ratio, inner_cfg).value
        elif form == "2f1":
            inner = pfq_sum([p.eta_p, -k], [1 - p.eta - k], ratio, inner_cfg).value
        else:
            raise ValueError(f"unknown form {form!r}")
        term = outer * complex(inner) * complex_power_neg_s(k + pt.a, pt.s)
        total += term
        small = small + 1 if abs(term) <= tol * max(1.0, abs(total)) else 0
        if small >= 3:
            return total
        if form == "3f2":
            outer *= (p.mu + k) * (p.eta + k) / ((p.nu + k) * (k + 1)) * pt.z
        else:
            outer *= (p.mu + k) / (k + 1) * pt.z
    raise NoConvergence(f"reduced outer series did not settle within {cap} terms")


def _cor45(rng, grid):
    n = 2 if grid == "small" else 6
    cases = []
    for _ in range(n):
        b, pt = sample_parameters(rng), sample_point(rng)
        p4 = ParameterSet(b.mu, b.eta, b.eta_p, b.xi, b.delta_p, b.nu, b.xi, b.xi_p)
        cases.append(IdentityCase(
            "cor4-reduced-series", "delta=xi: outer series with 3F2 inner sums against the double series",
            _point_dict(p4, pt),
            lambda p=p4, pt=pt: (reduced_outer_series(p, pt, "3f2"), _series(p, pt)),
            1e-10,
        ))
        p5 = ParameterSet(b.mu, b.eta, b.eta_p, b.xi, b.xi_p, b.eta, b.xi, b.xi_p)
        cases.append(IdentityCase(
            "cor5-reduced-series", "nu=eta, delta=xi, delta'=xi': outer series with 2F1 inner sums against the double series",
            _point_dict(p5, pt),
            lambda p=p5, pt=pt: (reduced_outer_series(p, pt, "2f1"), _series(p, pt)),
            1e-10,
        ))
    return cases


def _cor1(rng, grid):
    reps = 1 if grid == "small" else 3
    pairs = (
        (HumbertVariant.Phi1, LimitVariant.EtaPrimeInf),
        (HumbertVariant.Phi2, LimitVariant.MuInf),
        (HumbertVariant.Phi3, LimitVariant.MuAndEtaPrimeInf),
    )
    cases = []
    for _ in range(reps):
        for hv, lv in pairs:
            p, pt = _collapsed(sample_parameters(rng), False), sample_point(rng)
            cases.append(IdentityCase(
                "cor1-humbert", f"Mellin integral with Humbert {hv.value} kernel against the {lv.value} limit series",
                _point_dict(p, pt, kernel=hv.value),
                lambda p=p, pt=pt, hv=hv, lv=lv: (
                    eval_phi_integral_humbert(hv, p, pt, _QUAD).value,
                    eval_phi_limit_case(p, lv, pt, _TIGHT).value,
                ),
                1e-8,
            ))
    return cases


def _cor2(rng, grid):
    n = 3 if grid == "small" else 10
    cases = []
    for _ in range(n):
        p, pt = _collapsed(sample_parameters(rng), True), sample_point(rng)
        cases.append(IdentityCase(
            "cor2-closed-kernel", "Mellin integral with kernel (1-z e^-x)^-eta (1-t e^-x)^-eta' against the double series",
            _point_dict(p, pt),
            lambda p=p, pt=pt: (eval_phi_closed_kernel(p.eta, p.eta_p, pt, _QUAD).value, _series(p, pt)),
            1e-9,
        ))
    return cases


def _reductions(rng, grid):
    n = 2 if grid == "small" else 6
    cases = []
    for _ in range(n):
        b, pt = sample_parameters(rng), sample_point(rng)
        p1 = _collapsed(b, False)
        cases.append(IdentityCase(
            "case1-choi-parmar", "delta=xi, delta'=xi' against the three-parameter series",
            _point_dict(p1, pt),
            lambda p=p1, pt=pt: (_series(p, pt), eval_choi_parmar(p.mu, p.eta, p.eta_p, p.nu, pt, _TIGHT).value),
            1e-11,
        ))
        p2 = _collapsed(b, True)
        cases.append(IdentityCase(
            "case2-pathan-daman", "additionally mu=nu, against the two-parameter series",
            _point_dict(p2, pt),
            lambda p=p2, pt=pt: (_series(p, pt), eval_pathan_daman(p.eta, p.eta_p, pt, _TIGHT).value),
            1e-11,
        ))
    return cases


def _swap(rng, grid):
    n = 5 if grid == "small" else 50
    cases = []
    for _ in range(n):
        p, pt = sample_parameters(rng), sample_point(rng)
        cases.append(IdentityCase(
            "swap-symmetry", "invariance under (eta, delta, xi, z) <-> (eta', delta', xi', t)",
            _point_dict(p, pt),
            lambda p=p, pt=pt: (_series(p, pt), _series(p.swapped(), pt.swapped())),
            1e-12,
        ))
    return cases


LIMIT_SCALE = 1e6


def limit_rescaled(p: ParameterSet, variant: LimitVariant, pt: EvalPoint, scale: float) -> tuple[ParameterSet, EvalPoint]:
    """Full-Phi arguments whose value tends to the ``variant`` limit series as ``scale`` grows."""
    variant = LimitVariant(variant)
    mu, eta_p, z, t = p.mu, p.eta_p, pt.z, pt.t
    if variant in (LimitVariant.EtaPrimeInf, LimitVariant.MuAndEtaPrimeInf):
        eta_p, t = scale, t / scale
    if variant in (LimitVariant.MuInf, LimitVariant.MuAndEtaPrimeInf):
        mu, z, t = scale, z / scale, t / scale
    q = ParameterSet(mu, p.eta, eta_p, p.delta, p.delta_p, p.nu, p.xi, p.xi_p)
    return q, EvalPoint(z, t, pt.s, pt.a)


def _limits(rng, grid):
    reps = 1 if grid == "small" else 3
    cases = []
    for _ in range(reps):
        for ident, lv in (
            ("case3-limit", LimitVariant.EtaPrimeInf),
            ("case4-limit", LimitVariant.MuInf),
            ("case5-limit", LimitVariant.MuAndEtaPrimeInf),
        ):
            p, pt = sample_parameters(rng), sample_point(rng)
            cases.append(IdentityCase(
                ident, f"{lv.value} limit series against the full series with rescaled arguments at {LIMIT_SCALE:g}",
                _point_dict(p, pt, scale=LIMIT_SCALE),
                lambda p=p, pt=pt, lv=lv: (
                    eval_phi_limit_case(p, lv, pt, _TIGHT).value,
                    _series(*limit_rescaled(p, lv, pt, LIMIT_SCALE)),
                ),
                1e-5,
            ))
    return cases


FAMILIES = (
    _m4_closed_form,
    _thm1,
    _thm2,
    _cor3,
    _thm4,
    _thm5,
    _cor45,
    _cor1,
    _cor2,
    _reductions,
    _swap,
    _limits,
)


def build_cases(grid: str = "small", seed: int = 0) -> list[IdentityCase]:
    """All identity cases for ``grid``; sampling order is fixed by ``seed``."""
    if grid not in GRIDS:
        raise ValueError(f"grid must be one of {GRIDS}")
    rng = np.random.default_rng(seed)
    cases: list[IdentityCase] = []
    for family in FAMILIES:
        cases.extend(family(rng, grid))
    return cases


def run_case(case: IdentityCase, tol_override: float | None = None) -> IdentityReport:
    tol = case.tol if tol_override is None else tol_override
    try:
        lhs, rhs = case.compute()
    except (NoConvergence, QuadratureFailure) as exc:
        return IdentityReport(case.identity, case.description, case.point, None, None, None,
                              tol, False, f"{type(exc).__name__}: {exc}", converged=False)
    except HLZetaError as exc:
        return IdentityReport(case.identity, case.description, case.point, None, None, None,
                              tol, False, f"{type(exc).__name__}: {exc}")
    lhs, rhs = complex(lhs), complex(rhs)
    diff = abs(lhs - rhs)
    threshold = tol * max(1.0, abs(rhs)) if case.relative else tol
    ok = math.isfinite(diff) and diff <= threshold
    return IdentityReport(case.identity, case.description, case.point, lhs, rhs, diff, threshold, ok)


def run_suite(
    grid: str = "small",
    seed: int = 0,
    tol: float | None = None,
    jobs: int = 1,
) -> list[IdentityReport]:
    """Run every identity family; reports come back in case order."""
    cases = build_cases(grid, seed)
    if jobs <= 1:
        return [run_case(c, tol) for c in cases]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda c: run_case(c, tol), cases))


__all__ = [
    "FAMILIES",
    "GRIDS",
    "IdentityCase",
    "IdentityReport",
    "build_cases",
    "limit_rescaled",
    "reduced_outer_series",
    "run_case",
    "run_suite",
    "sample_parameters",
    "sample_point",
]
