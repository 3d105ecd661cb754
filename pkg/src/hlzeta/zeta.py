"""The two-variable extended Hurwitz-Lerch zeta function and its reductions.

    Phi(z, t, s, a) = sum_{k,l>=0} (mu)_{k+l} (eta)_k (eta')_l (delta)_k (delta')_l
                                   / ((nu)_{k+l} (xi)_k (xi')_l k! l!)
                                   * z^k t^l / (k + l + a)^s

Two independent summation routes are provided: the diagonal double series
(:func:`eval_phi_double_series`) and the outer-k representation with a finite
inner sum in powers of ``t/z`` (:func:`eval_phi_diagonal`).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DomainError,
    EvalPoint,
    EvalResult,
    Method,
    NoConvergence,
    ParameterSet,
    SeriesConfig,
    complex_power_neg_s,
    is_nonpositive_integer,
    pochhammer,
)
from .hypfun import (
    _StallMonitor,
    _terminating_index,
    diagonal_double_sum,
    pfq_sum,
)

MIN_BOUNDARY_MARGIN = 0.5


class LimitVariant(str, enum.Enum):
    Full = "Full"
    EtaPrimeInf = "EtaPrimeInf"
    MuInf = "MuInf"
    MuAndEtaPrimeInf = "MuAndEtaPrimeInf"


class ReductionTag(str, enum.Enum):
    General = "General"
    ChoiParmar = "ChoiParmar"
    PathanDaman = "PathanDaman"
    ClassicalPhi = "ClassicalPhi"
    PowerLaw = "PowerLaw"


@dataclass(frozen=True)
class SeriesShape:
    """Parameter lists of a double series in the engine's layout."""

    coupled_num: tuple
    coupled_den: tuple
    k_num: tuple
    k_den: tuple
    l_num: tuple
    l_den: tuple


def series_shape(p: ParameterSet, variant: LimitVariant = LimitVariant.Full) -> SeriesShape:
    """Which Pochhammer factors survive in each limit variant."""
    coupled_num = (p.mu,)
    l_num = (p.eta_p, p.delta_p)
    if variant in (LimitVariant.EtaPrimeInf, LimitVariant.MuAndEtaPrimeInf):
        l_num = (p.delta_p,)
    if variant in (LimitVariant.MuInf, LimitVariant.MuAndEtaPrimeInf):
        coupled_num = ()
    return SeriesShape(coupled_num, (p.nu,), (p.eta, p.delta), (p.xi,), l_num, (p.xi_p,))


def boundary_margin(shape: SeriesShape, pt: EvalPoint) -> float | None:
    """Check the convergence region; return the boundary decay margin if on it.

    A direction whose numerator count exceeds its denominator count by one
    (the factorial excluded) has unit radius; fewer numerators make the
    series entire in that variable.  On ``|z| = 1`` (or ``|t| = 1``) the terms
    decay like ``n**-(1 + margin)`` with ``margin = Re(s + sum(den) - sum(num))``
    over the factors acting in the boundary direction(s).
    """
    k_stop = _terminating_index(shape.k_num)
    l_stop = _terminating_index(shape.l_num)
    c_stop = _terminating_index(shape.coupled_num)
    if c_stop is not None:
        return None
    on_edge = []
    for label, arg, num, den, stop in (
        ("z", pt.z, shape.k_num, shape.k_den, k_stop),
        ("t", pt.t, shape.l_num, shape.l_den, l_stop),
    ):
        if stop is not None or arg == 0:
            continue
        excess = len(shape.coupled_num) + len(num) - len(shape.coupled_den) - len(den)
        if excess <= 0:
            continue
        if excess > 1:
            raise DomainError(f"series diverges in {label}")
        r = abs(arg)
        if r > 1.0:
            raise DomainError(f"requires |{label}| <= 1")
        if r == 1.0:
            on_edge.append((num, den))
    if not on_edge:
        return None
    num_sum = sum(shape.coupled_num) + sum(sum(n) for n, _ in on_edge)
    den_sum = sum(shape.coupled_den) + sum(sum(d) for _, d in on_edge)
    margin = (pt.s + den_sum - num_sum).real
    if margin <= MIN_BOUNDARY_MARGIN:
        raise DomainError(
            f"boundary evaluation needs Re(s + sum(den) - sum(num)) > {MIN_BOUNDARY_MARGIN}, got {margin:.6g}"
        )
    return margin


def _cfg(cfg: SeriesConfig | None) -> SeriesConfig:
    return SeriesConfig() if cfg is None else cfg


def _zeta_weight(pt: EvalPoint):
    a, s = pt.a, pt.s
    return lambda n: complex_power_neg_s(n + a, s)


def _sum_shape(shape: SeriesShape, pt: EvalPoint, cfg: SeriesConfig, what: str) -> EvalResult:
    margin = boundary_margin(shape, pt)
    raw = diagonal_double_sum(
        shape.coupled_num, shape.coupled_den,
        shape.k_num, shape.k_den,
        shape.l_num, shape.l_den,
        pt.z, pt.t, cfg,
        weight=_zeta_weight(pt),
        boundary_margin=margin,
    )
    res = EvalResult(complex(raw.value), raw.abs_err, raw.work, Method.DoubleSeries, raw.converged)
    if not raw.converged:
        raise NoConvergence(f"{what}: no convergence within {cfg.max_diagonal} diagonals", res)
    return res


def eval_phi_double_series(p: ParameterSet, pt: EvalPoint, cfg: SeriesConfig | None = None) -> EvalResult:
    """Phi by direct summation along the diagonals ``k + l = n``.

    Raises :class:`DomainError` outside ``|z|, |t| <= 1`` or on the unit
    circle without enough decay, :class:`NoConvergence` at the diagonal cap.
    """
    return _sum_shape(series_shape(p), pt, _cfg(cfg), "double series")


def eval_phi_limit_case(
    p: ParameterSet,
    variant: LimitVariant,
    pt: EvalPoint,
    cfg: SeriesConfig | None = None,
) -> EvalResult:
    """The limiting forms ``eta' -> inf``, ``mu -> inf`` or both.

    The removed parameters are ignored.  Each limit drops the matching
    Pochhammer factor: ``(eta')_l`` for :attr:`LimitVariant.EtaPrimeInf`,
    ``(mu)_{k+l}`` for :attr:`LimitVariant.MuInf`, both for
    :attr:`LimitVariant.MuAndEtaPrimeInf`.
    """
    variant = LimitVariant(variant)
    return _sum_shape(series_shape(p, variant), pt, _cfg(cfg), f"limit case {variant.value}")


def _grow(seq: list, stepper, upto: int) -> None:
    while len(seq) <= upto:
        seq.append(stepper(len(seq) - 1, seq[-1]))


def eval_phi_diagonal(
    p: ParameterSet,
    pt: EvalPoint,
    cfg: SeriesConfig | None = None,
    inner: str = "cauchy",
) -> EvalResult:
    """Phi as a single series over ``k`` with a terminating inner sum.

    ::

        Phi = sum_k (mu)_k / (nu)_k * z^k (a+k)^-s
                * sum_{l=0}^{k} (eta)_{k-l} (delta)_{k-l} (eta')_l (delta')_l
                                / ((xi)_{k-l} (xi')_l (k-l)! l!) * (t/z)^l

    ``inner="cauchy"`` evaluates the inner polynomial in ``t/z`` (or in
    ``z/t`` with ``t^k`` outside, whichever ratio is at most one in modulus)
    directly.  ``inner="pfq"`` instead normalises it to the terminating

        4F3(eta', delta', 1-xi-k, -k; 1-eta-k, 1-delta-k, xi'; t/z)

    times ``(eta)_k (delta)_k / ((xi)_k k!)``, which is only usable when no
    lower parameter is reached at a zero inside the terminating range
    (:class:`DomainError` otherwise).
    """
    cfg = _cfg(cfg)
    if pt.z == 0:
        raise DomainError("diagonal representation requires z != 0")
    if inner not in ("cauchy", "pfq"):
        raise ValueError(f"unknown inner mode {inner!r}")
    margin = boundary_margin(series_shape(p), pt)

    z, t, s, a = pt.z, pt.t, pt.s, pt.a
    mu, nu = p.mu, p.nu
    eta, delta, xi = p.eta, p.delta, p.xi
    eta_p, delta_p, xi_p = p.eta_p, p.delta_p, p.xi_p
    swap = inner == "cauchy" and abs(t) > abs(z)
    lead = t if swap else z
    ratio = z / t if swap else t / z

    a_tab = [1 + 0j]
    b_tab = [1 + 0j]
    a_step = lambda j, v: v * (eta + j) * (delta + j) / ((xi + j) * (j + 1))
    b_step = lambda j, v: v * (eta_p + j) * (delta_p + j) / ((xi_p + j) * (j + 1))

    mu_stop = _terminating_index([mu])
    outer = 1 + 0j  # (mu)_k / (nu)_k * lead^k
    monitor = _StallMonitor(cfg, margin)
    total = 0j
    abs_total = 0.0
    work = 0
    last = math.inf
    for k in range(cfg.max_diagonal + 1):
        if k and k % 64 == 0:
            outer = pochhammer(mu, k) / pochhammer(nu, k) * lead**k
        w = complex_power_neg_s(k + a, s)
        if inner == "cauchy":
            _grow(a_tab, a_step, k)
            _grow(b_tab, b_step, k)
            av = np.asarray(a_tab[: k + 1])
            bv = np.asarray(b_tab[: k + 1])
            # coefficient of ratio^l: A_{k-l} B_l (or A_l B_{k-l} when swapped)
            coeffs = av * bv[::-1] if swap else av[::-1] * bv
            inner_val = complex(np.polyval(coeffs[::-1], ratio))
        else:
            _check_pfq_poles(eta, delta, k)
            norm = pochhammer(eta, k) * pochhammer(delta, k) / (pochhammer(xi, k) * math.factorial(k))
            raw = pfq_sum(
                [eta_p, delta_p, 1 - xi - k, -k],
                [1 - eta - k, 1 - delta - k, xi_p],
                ratio,
                cfg,
            )
            inner_val = norm * complex(raw.value)
        work += k + 1
        contrib = outer * w * inner_val
        total += contrib
        abs_total += abs(contrib)
        if mu_stop is not None and k >= mu_stop:
            return EvalResult(total, 4e-16 * (abs_total + 1), work, Method.Diagonal, True)
        if monitor.update(k, contrib, total):
            err = monitor.estimate + 4e-16 * abs_total
            return EvalResult(total, err, work, Method.Diagonal, True)
        last = abs(contrib) * (1.0 if margin is None else (k + 1) / margin)
        outer = outer * (mu + k) / (nu + k) * lead
    res = EvalResult(total, last, work, Method.Diagonal, False)
    raise NoConvergence("diagonal representation: no convergence", res)


def _check_pfq_poles(eta: complex, delta: complex, k: int) -> None:
    for name, c in (("eta", eta), ("delta", delta)):
        lower = complex(1 - c - k)
        # (lower)_l vanishes for some l <= k exactly when -lower < k
        if is_nonpositive_integer(lower) and -lower.real < k:
            raise DomainError(f"4F3 inner form has a zero lower parameter for {name}={c}")


def classify_reduction(p: ParameterSet, pt: EvalPoint) -> ReductionTag:
    """Most specific known reduction, by exact parameter equality."""
    if pt.z == 0 and pt.t == 0:
        return ReductionTag.PowerLaw
    trivial_z = p.delta == p.xi
    trivial_t = p.delta_p == p.xi_p
    if p.mu == p.nu and trivial_z and trivial_t:
        if (pt.t == 0 and p.eta == 1) or (pt.z == 0 and p.eta_p == 1):
            return ReductionTag.ClassicalPhi
        return ReductionTag.PathanDaman
    if trivial_z and trivial_t:
        return ReductionTag.ChoiParmar
    return ReductionTag.General


def eval_classical_phi(z: complex, s: complex, a: complex, cfg: SeriesConfig | None = None) -> EvalResult:
    """One-variable Hurwitz-Lerch ``sum_k z^k / (k + a)^s``."""
    pt = EvalPoint(z, 0, s, a)
    # (1)_k / k! = 1 turns the engine's k-series into plain powers of z
    shape = SeriesShape((), (), (1,), (), (), ())
    return _sum_shape(shape, pt, _cfg(cfg), "classical Phi")


def eval_choi_parmar(mu, eta, eta_p, nu, pt: EvalPoint, cfg: SeriesConfig | None = None) -> EvalResult:
    """``sum (mu)_{k+l} (eta)_k (eta')_l / ((nu)_{k+l} k! l!) z^k t^l / (k+l+a)^s``."""
    shape = SeriesShape((mu,), (nu,), (eta,), (), (eta_p,), ())
    return _sum_shape(shape, pt, _cfg(cfg), "Choi-Parmar series")


def eval_pathan_daman(eta, eta_p, pt: EvalPoint, cfg: SeriesConfig | None = None) -> EvalResult:
    """``sum (eta)_k (eta')_l / (k! l!) z^k t^l / (k+l+a)^s``."""
    shape = SeriesShape((), (), (eta,), (), (eta_p,), ())
    return _sum_shape(shape, pt, _cfg(cfg), "Pathan-Daman series")


def summation_formula_lhs(
    p: ParameterSet,
    pt: EvalPoint,
    x: complex,
    r_max: int,
    cfg: SeriesConfig | None = None,
) -> EvalResult:
    """Partial sum ``sum_{r=0}^{r_max} (s)_r / r! * Phi(z, t, s+r, a) x^r``.

    For ``|x| < |a|`` this converges to ``Phi(z, t, s, a - x)``.  Each Phi is
    evaluated by :func:`eval_phi_diagonal` (the double series when ``z = 0``).
    The error estimate is the magnitude of the last retained term plus the
    propagated per-term estimates.
    """
    cfg = _cfg(cfg)
    x = complex(x)
    if r_max < 0:
        raise ValueError("r_max must be non-negative")
    if abs(x) >= abs(pt.a):
        raise DomainError("summation formula requires |x| < |a|")
    n_near = max(0, round(-pt.a.real))
    if abs(x) >= abs(n_near + pt.a):
        raise DomainError("summation formula requires |x| < |n + a| for all n >= 0")
    evaluate = eval_phi_double_series if pt.z == 0 else eval_phi_diagonal
    total = 0j
    err = 0.0
    work = 0
    coef = 1 + 0j  # (s)_r / r! * x^r
    last = 0.0
    for r in range(r_max + 1):
        if coef == 0:
            break
        shifted = EvalPoint(pt.z, pt.t, pt.s + r, pt.a)
        res = evaluate(p, shifted, cfg)
        term = coef * res.value
        total += term
        err += abs(coef) * res.abs_err_estimate
        work += res.work
        last = abs(term)
        coef *= (pt.s + r) / (r + 1) * x
    return EvalResult(total, err + last, work, Method.Diagonal, True)


__all__ = [
    "LimitVariant",
    "ReductionTag",
    "SeriesShape",
    "boundary_margin",
    "classify_reduction",
    "eval_choi_parmar",
    "eval_classical_phi",
    "eval_pathan_daman",
    "eval_phi_diagonal",
    "eval_phi_double_series",
    "eval_phi_limit_case",
    "series_shape",
    "summation_formula_lhs",
]
