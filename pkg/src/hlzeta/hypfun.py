"""Hypergeometric series: pFq, Appell F1, Humbert Phi1/Phi2/Phi3 and M4.

All two-variable series share one engine, :func:`diagonal_double_sum`, which
groups the terms on diagonals ``n = k + l``::

    sum_n  C_n * sum_{k+l=n} A_k B_l

where ``C_n`` holds the coupled ``(.)_{k+l}`` factors, ``A_k`` the ``k``-only
factors with ``x**k/k!`` and ``B_l`` the ``l``-only factors with ``y**l/l!``.
Arguments may be numpy arrays; the quadrature module evaluates kernels at all
nodes of a refinement level in one call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from .core import (
    DomainError,
    EvalResult,
    Method,
    NoConvergence,
    ParameterSet,
    SeriesConfig,
    complex_power_neg_s,
    is_nonpositive_integer,
    log_pochhammer,
)

RESYNC_EVERY = 64
_EPS = np.finfo(float).eps


def _terminating_index(num: Sequence[complex]) -> int | None:
    """Largest index with a nonzero term, or None for a non-terminating list."""
    stops = [int(-complex(c).real) for c in num if is_nonpositive_integer(c)]
    return min(stops) if stops else None


def _min_opt(*vals: int | None) -> int | None:
    vals = [v for v in vals if v is not None]
    return min(vals) if vals else None


def _check_denominators(den: Sequence[complex], stop: int | None, what: str) -> None:
    # (d)_j vanishes for j > -d; allowed only if the series stops first
    for d in den:
        if is_nonpositive_integer(d):
            m = int(-complex(d).real)
            if stop is None or stop > m:
                raise DomainError(
                    f"{what}: denominator parameter {complex(d).real:g} is a "
                    "non-positive integer reached before the series terminates"
                )


class _TermSequence:
    """``c_j = prod (num)_j / prod (den)_j / j!**f * w**j`` on an array ``w``.

    Advanced by the ratio recurrence; every ``RESYNC_EVERY`` steps the value is
    recomputed from log-Pochhammer sums to stop rounding drift.
    """

    def __init__(self, num, den, w, factorial=True, stop=None):
        self.num = [complex(c) for c in num]
        self.den = [complex(d) for d in den]
        self.w = np.asarray(w, dtype=complex)
        self.factorial = factorial
        self.stop = stop
        self.j = 0
        self.value = np.ones_like(self.w)
        with np.errstate(divide="ignore"):
            self._logw = np.log(np.where(self.w == 0, 1.0, self.w))
        self._wzero = self.w == 0

    def _resync(self) -> np.ndarray:
        j = self.j
        log_coef = sum(log_pochhammer(c, j) for c in self.num)
        log_coef -= sum(log_pochhammer(d, j) for d in self.den)
        if self.factorial:
            log_coef -= math.lgamma(j + 1)
        if log_coef.real == -math.inf:
            return np.zeros_like(self.w)
        with np.errstate(over="ignore", under="ignore"):
            out = np.exp(log_coef + j * self._logw)
        return np.where(self._wzero, 0j, out)

    def advance(self) -> np.ndarray:
        j = self.j
        if self.stop is not None and j >= self.stop:
            self.j = j + 1
            self.value = np.zeros_like(self.w)
            return self.value
        self.j = j + 1
        if self.j % RESYNC_EVERY == 0:
            self.value = self._resync()
            return self.value
        ratio = 1 + 0j
        for c in self.num:
            ratio *= c + j
        for d in self.den:
            ratio /= d + j
        if self.factorial:
            ratio /= j + 1
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            self.value = self.value * (ratio * self.w)
        return self.value


@dataclass
class SeriesSum:
    """Raw output of the series engines (value may be an array)."""

    value: np.ndarray | complex
    abs_err: float
    work: int
    converged: bool
    last_index: int


def _scalarize(v):
    v = np.asarray(v)
    return complex(v) if v.ndim == 0 else v


class _StallMonitor:
    """Stall criterion on successive contributions.

    A contribution counts as small when its geometric tail estimate
    ``|D_n| / (1 - q)``, with ``q = |D_n| / |D_{n-1}|``, is below
    ``tol * max(1, |partial sum|)``; ``|D_{n-1}|`` is replaced by the larger
    of the two previous magnitudes so exact cancellation on alternate
    diagonals does not reset the count.  ``stall_count`` consecutive small
    contributions end the summation.  With ``boundary_margin`` the estimate is
    the power-law tail ``|D_n| n / margin`` instead.
    """

    def __init__(self, cfg: SeriesConfig, boundary_margin: float | None = None):
        self.cfg = cfg
        self.margin = boundary_margin
        self.prev = None
        self.last = None
        self.window: list[float] = []

    def update(self, n: int, contrib, total) -> bool:
        mag = np.abs(contrib)
        if self.margin is not None:
            tail = mag * (n + 1) / self.margin
        else:
            if self.prev is None:
                q = np.full_like(mag, np.inf)
            else:
                with np.errstate(divide="ignore", invalid="ignore"):
                    q = np.where(self.prev > 0, mag / np.where(self.prev > 0, self.prev, 1.0), np.inf)
            with np.errstate(divide="ignore"):
                tail = np.where(mag == 0, 0.0, np.where(q < 1, mag / (1 - np.minimum(q, 0.999999)), np.inf))
        self.prev = mag if self.last is None else np.maximum(mag, self.last)
        self.last = mag
        ok = bool(np.all(tail <= self.cfg.tol * np.maximum(1.0, np.abs(total))))
        if ok:
            self.window.append(float(np.max(tail)))
        else:
            self.window.clear()
        return len(self.window) >= self.cfg.stall_count

    @property
    def estimate(self) -> float:
        return max(self.window) if self.window else math.inf


def pfq_sum(num, den, z, cfg: SeriesConfig) -> SeriesSum:
    """Sum ``pFq(num; den; z)`` for scalar or array ``z`` (no domain checks)."""
    stop = _terminating_index(num)
    z = np.asarray(z, dtype=complex)
    seq = _TermSequence(num, den, z, factorial=True, stop=stop)
    total = seq.value.copy()
    abs_total = np.abs(total)
    monitor = _StallMonitor(cfg)
    n = 0
    while True:
        if stop is not None and n >= stop:
            err = float(np.max(4 * _EPS * (abs_total + 1)))
            return SeriesSum(_scalarize(total), err, n + 1, True, n)
        if n >= cfg.max_diagonal:
            err = float(np.max(np.abs(seq.value)))
            return SeriesSum(_scalarize(total), err, n + 1, False, n)
        term = seq.advance()
        n += 1
        total = total + term
        abs_total = abs_total + np.abs(term)
        if stop is None and monitor.update(n, term, total):
            err = monitor.estimate + float(np.max(4 * _EPS * abs_total))
            return SeriesSum(_scalarize(total), err, n + 1, True, n)


def diagonal_double_sum(
    coupled_num: Sequence[complex],
    coupled_den: Sequence[complex],
    k_num: Sequence[complex],
    k_den: Sequence[complex],
    l_num: Sequence[complex],
    l_den: Sequence[complex],
    x,
    y,
    cfg: SeriesConfig,
    weight: Callable[[int], complex] | None = None,
    boundary_margin: float | None = None,
) -> SeriesSum:
    """Diagonal summation of a two-variable hypergeometric-type series.

    Term ``(k, l)``::

        prod(coupled_num)_{k+l} / prod(coupled_den)_{k+l}
          * prod(k_num)_k / prod(k_den)_k * x**k / k!
          * prod(l_num)_l / prod(l_den)_l * y**l / l!
          * weight(k + l)

    ``x`` and ``y`` are rescaled by ``rho = max(|x|, |y|)`` and ``rho**n`` is
    folded into the coupled factor, so large parameters paired with small
    arguments (the limit cases) do not overflow.

    With ``boundary_margin`` set, the diagonal contributions are assumed to
    decay like ``n**-(1+margin)`` and convergence requires the implied tail
    bound ``|D_n| n / margin`` to be under tolerance.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))
    rho = np.maximum(np.abs(x), np.abs(y))
    rho = np.where(rho == 0, 1.0, rho)

    k_stop = _terminating_index(k_num)
    l_stop = _terminating_index(l_num)
    # a vanishing argument confines the sum to one edge of the (k, l) grid
    if not np.any(x):
        k_stop = 0
    if not np.any(y):
        l_stop = 0
    c_stop = _terminating_index(coupled_num)
    n_stop = c_stop
    if k_stop is not None and l_stop is not None:
        n_stop = _min_opt(n_stop, k_stop + l_stop)
    k_stop = _min_opt(k_stop, n_stop)
    l_stop = _min_opt(l_stop, n_stop)
    _check_denominators(coupled_den, n_stop, "coupled")
    _check_denominators(k_den, k_stop, "k-series")
    _check_denominators(l_den, l_stop, "l-series")

    A = _TermSequence(k_num, k_den, x / rho, factorial=True, stop=k_stop)
    B = _TermSequence(l_num, l_den, y / rho, factorial=True, stop=l_stop)
    C = _TermSequence(coupled_num, coupled_den, rho, factorial=False, stop=n_stop)

    shape = x.shape
    cap = 64
    a_buf = np.empty((cap,) + shape, dtype=complex)
    b_buf = np.empty((cap,) + shape, dtype=complex)
    a_buf[0] = A.value
    b_buf[0] = B.value

    w0 = 1 + 0j if weight is None else weight(0)
    total = C.value * w0 * a_buf[0] * b_buf[0]
    abs_total = np.abs(total)
    monitor = _StallMonitor(cfg, boundary_margin)
    last_tail = math.inf
    work = 1
    n = 0
    while True:
        if n_stop is not None and n >= n_stop:
            err = float(np.max(4 * _EPS * (abs_total + 1)))
            return SeriesSum(_scalarize(total), err, work, True, n)
        if n >= cfg.max_diagonal:
            return SeriesSum(_scalarize(total), last_tail, work, False, n)
        n += 1
        if n >= cap:
            cap *= 2
            a_buf = np.concatenate([a_buf, np.empty_like(a_buf)])
            b_buf = np.concatenate([b_buf, np.empty_like(b_buf)])
        a_buf[n] = A.advance()
        b_buf[n] = B.advance()
        c_n = C.advance()
        lo = 0 if l_stop is None else max(0, n - l_stop)
        hi = n if k_stop is None else min(n, k_stop)
        if lo > hi:
            inner = np.zeros(shape, dtype=complex)
        else:
            inner = np.sum(a_buf[lo:hi + 1] * b_buf[n - hi:n - lo + 1][::-1], axis=0)
            work += hi - lo + 1
        w_n = 1 + 0j if weight is None else weight(n)
        with np.errstate(invalid="ignore", over="ignore"):
            contrib = c_n * w_n * inner
        total = total + contrib
        abs_total = abs_total + np.abs(contrib)
        if n_stop is not None:
            continue
        if monitor.update(n, contrib, total):
            err = monitor.estimate + float(np.max(4 * _EPS * abs_total))
            return SeriesSum(_scalarize(total), err, work, True, n)
        last_tail = float(np.max(np.abs(contrib))) * (
            1.0 if boundary_margin is None else (n + 1) / boundary_margin
        )


def _finish(raw: SeriesSum, what: str, method: Method = Method.DoubleSeries) -> EvalResult:
    res = EvalResult(raw.value, raw.abs_err, raw.work, method, raw.converged)
    if not raw.converged:
        raise NoConvergence(f"{what}: no convergence after {raw.last_index} terms", res)
    return res


def _cfg(cfg: SeriesConfig | None) -> SeriesConfig:
    return SeriesConfig() if cfg is None else cfg


def _require_unit_disc(name: str, **args) -> None:
    for label, v in args.items():
        if np.any(np.abs(np.asarray(v)) >= 1.0):
            raise DomainError(f"{name}: requires |{label}| < 1")


# --- single-variable --------------------------------------------------------

def eval_pfq(num: Sequence[complex], den: Sequence[complex], z, cfg: SeriesConfig | None = None) -> EvalResult:
    """Generalized hypergeometric series ``pFq(num; den; z)``.

    Terminating series (a numerator parameter in ``{0, -1, -2, ...}``) are
    summed exactly.  Otherwise ``p <= q`` converges for every ``z``,
    ``p = q + 1`` needs ``|z| < 1`` and ``p > q + 1`` is rejected.
    """
    cfg = _cfg(cfg)
    num = [complex(c) for c in num]
    den = [complex(d) for d in den]
    stop = _terminating_index(num)
    _check_denominators(den, stop, "pFq")
    if stop is None:
        p, q = len(num), len(den)
        if p > q + 1:
            raise DomainError(f"{p}F{q} diverges unless it terminates")
        if p == q + 1:
            _require_unit_disc(f"{p}F{q}", z=z)
    return _finish(pfq_sum(num, den, z, cfg), "pFq")


# --- two-variable -----------------------------------------------------------

def eval_appell_f1(a, b, b_p, c, z, t, cfg: SeriesConfig | None = None) -> EvalResult:
    """Appell ``F1(a, b, b'; c; z, t)`` for ``|z| < 1``, ``|t| < 1``."""
    if is_nonpositive_integer(c):
        raise DomainError("F1: c must not be a non-positive integer")
    _require_unit_disc("F1", z=z, t=t)
    raw = diagonal_double_sum([a], [c], [b], [], [b_p], [], z, t, _cfg(cfg))
    return _finish(raw, "F1")


def appell_f1_rows(a, b, b_p, c, z, t, cfg: SeriesConfig | None = None) -> EvalResult:
    """``F1`` through its row expansion ``sum_k (a)_k (b)_k/(c)_k 2F1(a+k, b'; c+k; t) z^k/k!``."""
    cfg = _cfg(cfg)
    _require_unit_disc("F1", z=z, t=t)
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    total = 0j
    coef = 1 + 0j
    work = 0
    stall = 0
    for k in range(cfg.max_diagonal):
        inner = pfq_sum([a + k, b_p], [c + k], t, cfg)
        work += inner.work
        term = coef * inner.value
        total += term
        if abs(term) <= cfg.tol * max(1.0, abs(total)):
            stall += 1
            if stall >= cfg.stall_count:
                return EvalResult(total, abs(term), work, Method.DoubleSeries, True)
        else:
            stall = 0
        coef *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        if coef == 0:
            return EvalResult(total, 0.0, work, Method.DoubleSeries, True)
    raise NoConvergence("F1 rows: no convergence", EvalResult(total, abs(term), work, Method.DoubleSeries, False))


def humbert_phi1_sum(a, b, c, z, t, cfg: SeriesConfig) -> SeriesSum:
    return diagonal_double_sum([a], [c], [b], [], [], [], z, t, cfg)


def humbert_phi2_sum(b, b_p, c, z, t, cfg: SeriesConfig) -> SeriesSum:
    return diagonal_double_sum([], [c], [b], [], [b_p], [], z, t, cfg)


def humbert_phi3_sum(b, c, z, t, cfg: SeriesConfig) -> SeriesSum:
    return diagonal_double_sum([], [c], [b], [], [], [], z, t, cfg)


def eval_humbert_phi1(a, b, c, z, t, cfg: SeriesConfig | None = None) -> EvalResult:
    """Humbert ``Phi1(a, b; c; z, t)``; ``|z| < 1``, any ``t``."""
    if is_nonpositive_integer(c):
        raise DomainError("Phi1: c must not be a non-positive integer")
    _require_unit_disc("Phi1", z=z)
    return _finish(humbert_phi1_sum(a, b, c, z, t, _cfg(cfg)), "Phi1")


def eval_humbert_phi2(b, b_p, c, z, t, cfg: SeriesConfig | None = None) -> EvalResult:
    """Humbert ``Phi2(b, b'; c; z, t)``; entire in both arguments."""
    if is_nonpositive_integer(c):
        raise DomainError("Phi2: c must not be a non-positive integer")
    return _finish(humbert_phi2_sum(b, b_p, c, z, t, _cfg(cfg)), "Phi2")


def eval_humbert_phi3(b, c, z, t, cfg: SeriesConfig | None = None) -> EvalResult:
    """Humbert ``Phi3(b; c; z, t)``; entire in both arguments."""
    if is_nonpositive_integer(c):
        raise DomainError("Phi3: c must not be a non-positive integer")
    return _finish(humbert_phi3_sum(b, c, z, t, _cfg(cfg)), "Phi3")


def m4_sum(p: ParameterSet, x, y, cfg: SeriesConfig) -> SeriesSum:
    return diagonal_double_sum(
        [p.mu], [p.nu],
        [p.eta, p.delta], [p.xi],
        [p.eta_p, p.delta_p], [p.xi_p],
        x, y, cfg,
    )


def eval_m4(p: ParameterSet, x, y, cfg: SeriesConfig | None = None) -> EvalResult:
    """Appell-type ``M4(mu, eta, eta', delta, delta'; nu, xi, xi'; x, y)``, ``|x|, |y| < 1``."""
    _require_unit_disc("M4", x=x, y=y)
    return _finish(m4_sum(p, x, y, _cfg(cfg)), "M4")


def m4_closed_form(eta, eta_p, x, y) -> complex:
    """``(1-x)**-eta * (1-y)**-eta'``, the value of M4 when ``mu=nu, delta=xi, delta'=xi'``."""
    x, y = complex(x), complex(y)
    if x == 1 or y == 1:
        raise DomainError("m4_closed_form: x and y must differ from 1")
    return complex_power_neg_s(1 - x, eta) * complex_power_neg_s(1 - y, eta_p)


def binomial_kernel(eta, w) -> np.ndarray:
    """Vectorised principal-branch ``(1 - w)**-eta``."""
    w = np.asarray(w, dtype=complex)
    return np.exp(-complex(eta) * np.log(1 - w + 0j))


__all__ = [
    "SeriesSum",
    "appell_f1_rows",
    "binomial_kernel",
    "diagonal_double_sum",
    "eval_appell_f1",
    "eval_humbert_phi1",
    "eval_humbert_phi2",
    "eval_humbert_phi3",
    "eval_m4",
    "eval_pfq",
    "humbert_phi1_sum",
    "humbert_phi2_sum",
    "humbert_phi3_sum",
    "m4_closed_form",
    "m4_sum",
    "pfq_sum",
]
