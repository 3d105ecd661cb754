"""Quadrature of the Mellin-type and beta-kernel integral representations.

Every integral is computed with tanh-sinh (double exponential) quadrature on
a finite interval.  The driver works in log space: integrands return a pair
``(log_scale, values)`` so endpoint factors such as ``x**(s-1)`` or
``(1-u)**(nu-mu-1)`` never overflow or underflow at nodes that crowd the
endpoints.  The semi-infinite ``x``-integrals are cut at ``QuadConfig.tail_cut``;
the semi-infinite ``y``-integral of the beta representation is mapped to
``u in (0, 1)`` by ``y = u / (1 - u)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from .core import (
    DomainError,
    EvalPoint,
    EvalResult,
    Method,
    NoConvergence,
    ParameterSet,
    QuadConfig,
    QuadratureFailure,
    SeriesConfig,
    log_gamma,
)
from .hypfun import (
    binomial_kernel,
    diagonal_double_sum,
    humbert_phi1_sum,
    humbert_phi2_sum,
    humbert_phi3_sum,
    m4_sum,
    pfq_sum,
)

H0 = 0.5
MAX_ENDPOINT_EXPONENT = 350.0

# integrand(x, log_x, log_rem) -> (log_scale, values); rem is the distance to the right end
Integrand = Callable[[np.ndarray, np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass
class QuadResult:
    value: complex
    abs_err: float
    nodes: int
    level: int


def _log_expit(v: np.ndarray) -> np.ndarray:
    return -np.logaddexp(0.0, -v)


def _endpoint_tau(length: float, tol: float, order: float) -> float:
    """Half-width in tau so that the neglected endpoint piece is ~tol/100.

    Near an endpoint the integrand behaves like ``d**(order-1)`` in the
    distance ``d``; the piece below ``d_min`` is about ``d_min**order/order``.
    """
    order = max(order, 1e-3)
    target = math.log(order * tol * 1e-2) / order
    u = 0.5 * (math.log(length) - target)
    u = min(max(u, 3.0), MAX_ENDPOINT_EXPONENT)
    return math.asinh(2.0 * u / math.pi)


def _nodes(length: float, taus: np.ndarray):
    u = 0.5 * math.pi * np.sinh(taus)
    log_l = math.log(length)
    log_x = log_l + _log_expit(2 * u)
    log_rem = log_l + _log_expit(-2 * u)
    log_w = log_l + math.log(math.pi) + np.log(np.cosh(taus)) + _log_expit(2 * u) + _log_expit(-2 * u)
    x = length * special.expit(2 * u)
    return x, log_x, log_rem, log_w


def _level_taus(level: int, t_left: float, t_right: float) -> np.ndarray:
    h = H0 / 2**level
    j_lo = -int(math.floor(t_left / h))
    j_hi = int(math.floor(t_right / h))
    j = np.arange(j_lo, j_hi + 1)
    if level > 0:
        j = j[j % 2 != 0]
    return j * h


def _weighted_sum(integrand: Integrand, length: float, taus: np.ndarray) -> complex:
    x, log_x, log_rem, log_w = _nodes(length, taus)
    log_scale, values = integrand(x, log_x, log_rem)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        terms = np.exp(log_scale + log_w) * values
    terms = np.where(np.isfinite(terms), terms, 0.0)
    return complex(np.sum(terms))


def tanh_sinh(
    integrand: Integrand,
    length: float,
    tol: float,
    max_levels: int,
    left_order: float = 1.0,
    right_order: float = 1.0,
) -> QuadResult:
    """Integrate over ``(0, length)`` by tanh-sinh with step halving.

    ``left_order``/``right_order`` are the real exponents ``p`` with the
    integrand ~ ``d**(p-1)`` at each end; they size the node range.  The
    error estimate is the change between the last two levels.
    """
    t_left = _endpoint_tau(length, tol, left_order)
    t_right = _endpoint_tau(length, tol, right_order)
    taus = _level_taus(0, t_left, t_right)
    total = _weighted_sum(integrand, length, taus)
    nodes = taus.size
    prev = H0 * total
    diff = math.inf
    for level in range(1, max_levels + 1):
        taus = _level_taus(level, t_left, t_right)
        total += _weighted_sum(integrand, length, taus)
        nodes += taus.size
        cur = H0 / 2**level * total
        diff = abs(cur - prev)
        if diff <= tol * max(1.0, abs(cur)):
            return QuadResult(cur, diff, nodes, level)
        prev = cur
    raise QuadratureFailure(
        f"tanh-sinh did not reach tol={tol:g} in {max_levels} levels (last change {diff:.3g})",
        EvalResult(prev, diff, nodes, Method.QuadM4, False),
    )


def _check_mellin_domain(pt: EvalPoint) -> None:
    if pt.s.real <= 0 or pt.a.real <= 0:
        raise DomainError("integral representation requires Re(s) > 0 and Re(a) > 0")


def mellin_tail_cut(pt: EvalPoint, tol: float, kernel_bound: float = 1.0) -> float:
    """Upper limit ``X`` with the neglected Mellin tail below ``tol/10``.

    Bound: ``|1/Gamma(s)| * Gamma(sigma, alpha X) / alpha**sigma * kernel_bound``
    with ``sigma = Re s`` and ``alpha = Re a``.
    """
    sigma, alpha = pt.s.real, pt.a.real
    x_cut = max(1.0, -math.log(tol * alpha) / alpha)
    log_norm = math.lgamma(sigma) - sigma * math.log(alpha) - log_gamma(pt.s).real
    log_norm += math.log(max(kernel_bound, 1e-300))
    target = math.log(tol / 10)
    for _ in range(200):
        q = special.gammaincc(sigma, alpha * x_cut)
        if q == 0 or math.log(q) + log_norm <= target:
            return x_cut
        x_cut *= 1.2
    return x_cut


def _mellin(
    kernel: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray, float]],
    pt: EvalPoint,
    qcfg: QuadConfig,
    method: Method,
    left_order: float | None = None,
) -> EvalResult:
    """``(1/Gamma(s)) int_0^X x^(s-1) e^(-a x) K(x) dx``.

    ``kernel(x, log_x)`` returns ``(log_factor, values, abs_err)`` with
    ``K = exp(log_factor) * values``.
    """
    _check_mellin_domain(pt)
    s, a = pt.s, pt.a
    lg = log_gamma(s)
    kerr = [0.0]
    if qcfg.tail_cut is None:
        probe = np.array([10.0])
        lf, kv, _ = kernel(probe, np.log(probe))
        bound = 2.0 * float(np.abs(np.exp(lf) * kv)[0])
        x_cut = mellin_tail_cut(pt, qcfg.tol, max(bound, 1.0))
    else:
        x_cut = qcfg.tail_cut

    def integrand(x, log_x, log_rem):
        lf, kv, err = kernel(x, log_x)
        kerr[0] = max(kerr[0], err)
        return (s - 1) * log_x - a * x - lg + lf, kv

    order = pt.s.real if left_order is None else left_order
    if order <= 0:
        raise DomainError("integrand is not integrable at x = 0")
    try:
        res = tanh_sinh(integrand, x_cut, qcfg.tol, qcfg.max_levels, left_order=order)
    except QuadratureFailure as exc:
        exc.result.method = method
        raise
    # kernel truncation error integrated against |x^(s-1) e^(-ax) / Gamma(s)|
    weight_mass = math.exp(math.lgamma(pt.s.real) - pt.s.real * math.log(pt.a.real) - lg.real)
    err = res.abs_err + kerr[0] * weight_mass + qcfg.tol / 10
    return EvalResult(res.value, err, res.nodes, method, True)


def _kernel_cfg(qcfg: QuadConfig, scfg: SeriesConfig | None) -> SeriesConfig:
    base = SeriesConfig() if scfg is None else scfg
    return SeriesConfig(tol=qcfg.tol / 100, max_diagonal=base.max_diagonal, stall_count=base.stall_count)


def _series_kernel(fn, what: str):
    def kernel(x, log_x):
        raw = fn(np.exp(-x))
        if not raw.converged:
            raise NoConvergence(f"{what} kernel series did not converge at a quadrature node")
        return np.zeros(x.shape), np.asarray(raw.value), raw.abs_err

    return kernel


def _require_interior(pt: EvalPoint, what: str) -> None:
    if not pt.interior:
        raise DomainError(f"{what}: series kernels need |z| < 1 and |t| < 1")


def _quad(qcfg: QuadConfig | None) -> QuadConfig:
    return QuadConfig() if qcfg is None else qcfg


def eval_phi_integral_m4(
    p: ParameterSet,
    pt: EvalPoint,
    qcfg: QuadConfig | None = None,
    scfg: SeriesConfig | None = None,
) -> EvalResult:
    """``(1/Gamma(s)) int_0^inf x^(s-1) e^(-ax) M4(...; z e^-x, t e^-x) dx``.

    The M4 kernel is summed at every node of a refinement level at once.
    """
    qcfg = _quad(qcfg)
    _require_interior(pt, "M4 integral")
    kcfg = _kernel_cfg(qcfg, scfg)
    kernel = _series_kernel(lambda e: m4_sum(p, pt.z * e, pt.t * e, kcfg), "M4")
    return _mellin(kernel, pt, qcfg, Method.QuadM4)


class HumbertVariant(str, enum.Enum):
    Phi1 = "Phi1"
    Phi2 = "Phi2"
    Phi3 = "Phi3"


def eval_phi_integral_humbert(
    variant: HumbertVariant | str,
    p: ParameterSet,
    pt: EvalPoint,
    qcfg: QuadConfig | None = None,
    scfg: SeriesConfig | None = None,
) -> EvalResult:
    """Mellin integrals with Humbert kernels (``delta = xi``, ``delta' = xi'``).

    * ``Phi1(mu, eta; nu)`` reproduces the ``eta' -> inf`` limit series,
    * ``Phi2(eta, eta'; nu)`` the ``mu -> inf`` limit,
    * ``Phi3(eta; nu)`` the limit in both.
    """
    variant = HumbertVariant(variant)
    qcfg = _quad(qcfg)
    if p.delta != p.xi or p.delta_p != p.xi_p:
        raise DomainError("Humbert kernels require delta = xi and delta' = xi'")
    kcfg = _kernel_cfg(qcfg, scfg)
    z, t = pt.z, pt.t
    if variant is HumbertVariant.Phi1:
        if abs(z) >= 1:
            raise DomainError("Phi1 kernel requires |z| < 1")
        fn = lambda e: humbert_phi1_sum(p.mu, p.eta, p.nu, z * e, t * e, kcfg)
    elif variant is HumbertVariant.Phi2:
        fn = lambda e: humbert_phi2_sum(p.eta, p.eta_p, p.nu, z * e, t * e, kcfg)
    else:
        fn = lambda e: humbert_phi3_sum(p.eta, p.nu, z * e, t * e, kcfg)
    return _mellin(_series_kernel(fn, variant.value), pt, qcfg, Method.QuadM4)


def _log_one_minus(c: complex, x: np.ndarray, log_x: np.ndarray) -> np.ndarray:
    """``log(1 - c e^-x)``, accurate as ``x -> 0`` when ``c = 1``."""
    if c == 1:
        small = x < 1e-5
        ratio = np.where(small, 1 - x / 2 + x * x / 6, -np.expm1(-x) / np.where(small, 1.0, x))
        return (log_x + np.log(ratio)).astype(complex)
    return np.log(1 - c * np.exp(-x) + 0j)


def closed_kernel_order(eta, eta_p, pt: EvalPoint) -> float:
    """Exponent of the integrand at ``x = 0``: ``x**(s - 1 - eta[z=1] - eta'[t=1])``."""
    order = pt.s.real
    if pt.z == 1:
        order -= complex(eta).real
    if pt.t == 1:
        order -= complex(eta_p).real
    return order


def eval_phi_closed_kernel(
    eta,
    eta_p,
    pt: EvalPoint,
    qcfg: QuadConfig | None = None,
) -> EvalResult:
    """The ``mu = nu, delta = xi, delta' = xi'`` case with its closed kernel.

    ``(1/Gamma(s)) int_0^inf x^(s-1) e^(-ax) (1 - z e^-x)^-eta (1 - t e^-x)^-eta' dx``

    ``z = 1`` or ``t = 1`` is accepted when the resulting ``x = 0``
    singularity is integrable (``Re(s) > Re(eta)`` for ``z = 1``, summed
    exponents when both equal 1).
    """
    qcfg = _quad(qcfg)
    eta, eta_p = complex(eta), complex(eta_p)
    if abs(pt.z) > 1 or abs(pt.t) > 1:
        raise DomainError("closed kernel requires |z| <= 1 and |t| <= 1")
    order = closed_kernel_order(eta, eta_p, pt)
    if order <= 0:
        raise DomainError("closed kernel: x = 0 singularity is not integrable for these s, eta")

    def kernel(x, log_x):
        lf = np.zeros(x.shape, dtype=complex)
        if pt.z != 0 and eta != 0:
            lf = lf - eta * _log_one_minus(pt.z, x, log_x)
        if pt.t != 0 and eta_p != 0:
            lf = lf - eta_p * _log_one_minus(pt.t, x, log_x)
        return lf, np.ones(x.shape, dtype=complex), 0.0

    return _mellin(kernel, pt, qcfg, Method.ClosedKernel, left_order=order)


def _check_beta(p: ParameterSet) -> None:
    if not (p.nu.real > p.mu.real > 0):
        raise DomainError("beta-kernel representation requires Re(nu) > Re(mu) > 0")


def _log_beta_norm(p: ParameterSet) -> complex:
    return log_gamma(p.nu) - log_gamma(p.mu) - log_gamma(p.nu - p.mu)


def eval_phi_beta_integral_1d(
    p: ParameterSet,
    pt: EvalPoint,
    qcfg: QuadConfig | None = None,
    scfg: SeriesConfig | None = None,
) -> EvalResult:
    """Beta-kernel single integral over ``y``, mapped to ``u = y/(1+y)``::

        Gamma(nu) / (Gamma(mu) Gamma(nu-mu))
          * int_0^1 u^(mu-1) (1-u)^(nu-mu-1) Phi_red(z u, t u, s, a) du

    ``Phi_red`` keeps the ``eta, delta, xi`` and primed factors but neither
    ``(mu)_{k+l}`` nor ``(nu)_{k+l}``; it is summed at all nodes at once.
    """
    qcfg = _quad(qcfg)
    _check_beta(p)
    _require_interior(pt, "beta integral")
    kcfg = _kernel_cfg(qcfg, scfg)
    norm = _log_beta_norm(p)
    a, s = pt.a, pt.s
    weight = lambda n: complex(np.exp(-s * np.log(n + a + 0j)))
    kerr = [0.0]

    def integrand(u, log_u, log_rem):
        raw = diagonal_double_sum(
            (), (),
            (p.eta, p.delta), (p.xi,),
            (p.eta_p, p.delta_p), (p.xi_p,),
            pt.z * u, pt.t * u, kcfg,
            weight=weight,
        )
        if not raw.converged:
            raise NoConvergence("reduced Phi did not converge at a quadrature node")
        kerr[0] = max(kerr[0], raw.abs_err)
        return (p.mu - 1) * log_u + (p.nu - p.mu - 1) * log_rem + norm, np.asarray(raw.value)

    try:
        res = tanh_sinh(
            integrand, 1.0, qcfg.tol, qcfg.max_levels,
            left_order=p.mu.real, right_order=(p.nu - p.mu).real,
        )
    except QuadratureFailure as exc:
        exc.result.method = Method.QuadBeta1D
        raise
    return EvalResult(res.value, res.abs_err + kerr[0] * abs(np.exp(norm)), res.nodes, Method.QuadBeta1D, True)


def _gauss_hyp_factor(eta, delta, xi, w: np.ndarray, kcfg: SeriesConfig) -> tuple[np.ndarray, float]:
    """``2F1(eta, delta; xi; w)``, closed binomial form when ``delta = xi``."""
    if delta == xi:
        return binomial_kernel(eta, w), 0.0
    if eta == xi:
        return binomial_kernel(delta, w), 0.0
    raw = pfq_sum([eta, delta], [xi], w, kcfg)
    if not raw.converged:
        raise NoConvergence("2F1 factor did not converge at a quadrature node")
    return np.asarray(raw.value), raw.abs_err


def eval_phi_beta_integral_2d(
    p: ParameterSet,
    pt: EvalPoint,
    qcfg: QuadConfig | None = None,
    scfg: SeriesConfig | None = None,
) -> EvalResult:
    """Double integral over ``(x, u)`` with factored one-variable kernels.

    ``2F1(eta, delta; xi; z u e^-x) * 2F1(eta', delta'; xi'; t u e^-x)`` is
    integrated against ``x^(s-1) e^(-ax) / Gamma(s)`` and the beta weight
    in ``u``, on a tensor tanh-sinh grid.  With ``delta = xi`` (or
    ``delta' = xi'``) the factor is the closed binomial ``(1 - w)^-eta``.
    """
    qcfg = _quad(qcfg)
    _check_beta(p)
    _check_mellin_domain(pt)
    _require_interior(pt, "2D beta integral")
    kcfg = _kernel_cfg(qcfg, scfg)
    s, a = pt.s, pt.a
    log_norm = _log_beta_norm(p) - log_gamma(s)
    x_cut = qcfg.tail_cut if qcfg.tail_cut is not None else mellin_tail_cut(pt, qcfg.tol, 2.0 * _kernel_mag(p, pt))

    tx_l = _endpoint_tau(x_cut, qcfg.tol, pt.s.real)
    tx_r = _endpoint_tau(x_cut, qcfg.tol, 1.0)
    tu_l = _endpoint_tau(1.0, qcfg.tol, p.mu.real)
    tu_r = _endpoint_tau(1.0, qcfg.tol, (p.nu - p.mu).real)

    def grid_sum(level: int) -> tuple[complex, int, float]:
        h = H0 / 2**level
        tx = np.arange(-math.floor(tx_l / h), math.floor(tx_r / h) + 1) * h
        tu = np.arange(-math.floor(tu_l / h), math.floor(tu_r / h) + 1) * h
        x, log_x, _, lw_x = _nodes(x_cut, tx)
        u, log_u, log_ru, lw_u = _nodes(1.0, tu)
        lx = (s - 1) * log_x - a * x + lw_x
        lu = (p.mu - 1) * log_u + (p.nu - p.mu - 1) * log_ru + lw_u
        w = np.outer(np.exp(-x), u)
        f1, e1 = _gauss_hyp_factor(p.eta, p.delta, p.xi, pt.z * w, kcfg)
        f2, e2 = _gauss_hyp_factor(p.eta_p, p.delta_p, p.xi_p, pt.t * w, kcfg)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            scale = np.exp(lx[:, None] + lu[None, :] + log_norm)
            terms = scale * f1 * f2
        terms = np.where(np.isfinite(terms), terms, 0.0)
        return complex(np.sum(terms)) * h * h, tx.size * tu.size, max(e1, e2)

    prev, nodes, kerr = grid_sum(0)
    diff = math.inf
    for level in range(1, qcfg.max_levels + 1):
        cur, n, e = grid_sum(level)
        nodes += n
        kerr = max(kerr, e)
        diff = abs(cur - prev)
        if diff <= qcfg.tol * max(1.0, abs(cur)):
            return EvalResult(cur, diff + 4 * kerr * abs(cur) + qcfg.tol / 10, nodes, Method.QuadBeta2D, True)
        prev = cur
    raise QuadratureFailure(
        f"2D tanh-sinh did not reach tol={qcfg.tol:g}",
        EvalResult(prev, diff, nodes, Method.QuadBeta2D, False),
    )


def _kernel_mag(p: ParameterSet, pt: EvalPoint) -> float:
    # the 2F1 factors at the largest argument bound the kernel on the tail
    probe = np.array([math.exp(-10.0)])
    f1, _ = _gauss_hyp_factor(p.eta, p.delta, p.xi, pt.z * probe, SeriesConfig(tol=1e-6))
    f2, _ = _gauss_hyp_factor(p.eta_p, p.delta_p, p.xi_p, pt.t * probe, SeriesConfig(tol=1e-6))
    return max(1.0, float(np.abs(f1 * f2)[0]))


__all__ = [
    "HumbertVariant",
    "QuadResult",
    "closed_kernel_order",
    "eval_phi_beta_integral_1d",
    "eval_phi_beta_integral_2d",
    "eval_phi_closed_kernel",
    "eval_phi_integral_humbert",
    "eval_phi_integral_m4",
    "mellin_tail_cut",
    "tanh_sinh",
]
