"""Brute-force reference sums in double-double arithmetic.

Test-time oracle, deliberately independent of the production summation: no
diagonal grouping, no term recurrences, every term assembled from three
tabulated factors (coupled, ``k``-side, ``l``-side) and accumulated row by row (``k`` outer, ``l`` inner) in
a complex double-double accumulator (~31 significant digits).  The tables are
running products of exact linear factors in double-double; only the transcendental factor
``(k+l+a)^-s`` enters in double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    EvalPoint,
    HLZetaError,
    ParameterSet,
    complex_power_neg_s,
)

_SPLITTER = 134217729.0  # 2**27 + 1
MAX_EXTENT = 5000
MAX_MODULUS = 0.9


class TailBoundUnavailable(HLZetaError):
    """The geometric majorant of the term ratio is not below one."""


# --- double-double reals ------------------------------------------------------

def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    return s, b - (s - a)


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a: float, b: float) -> tuple[float, float]:
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


class DD:
    """Unevaluated sum ``hi + lo`` of two doubles."""

    __slots__ = ("hi", "lo")

    def __init__(self, hi: float = 0.0, lo: float = 0.0):
        self.hi = hi
        self.lo = lo

    def __add__(self, other: "DD") -> "DD":
        s, e = _two_sum(self.hi, other.hi)
        t, f = _two_sum(self.lo, other.lo)
        e += t
        s, e = _quick_two_sum(s, e)
        e += f
        return DD(*_quick_two_sum(s, e))

    def __neg__(self) -> "DD":
        return DD(-self.hi, -self.lo)

    def __sub__(self, other: "DD") -> "DD":
        return self + (-other)

    def __mul__(self, other: "DD") -> "DD":
        p, e = _two_prod(self.hi, other.hi)
        e += self.hi * other.lo + self.lo * other.hi
        return DD(*_quick_two_sum(p, e))

    def __truediv__(self, other: "DD") -> "DD":
        q1 = self.hi / other.hi
        r = self - other * DD(q1)
        q2 = r.hi / other.hi
        r = r - other * DD(q2)
        q3 = r.hi / other.hi
        q = DD(*_quick_two_sum(q1, q2))
        return q + DD(q3)

    def __float__(self) -> float:
        return self.hi + self.lo

    def __repr__(self) -> str:
        return f"DD({self.hi!r}, {self.lo!r})"


class CDD:
    """Complex number with double-double real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: DD, im: DD):
        self.re = re
        self.im = im

    @classmethod
    def from_complex(cls, c: complex) -> "CDD":
        c = complex(c)
        return cls(DD(c.real), DD(c.imag))

    def __add__(self, other: "CDD") -> "CDD":
        return CDD(self.re + other.re, self.im + other.im)

    def __mul__(self, other: "CDD") -> "CDD":
        return CDD(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other: "CDD") -> "CDD":
        den = other.re * other.re + other.im * other.im
        num = self * CDD(other.re, -other.im)
        return CDD(num.re / den, num.im / den)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def abs_float(self) -> float:
        return abs(complex(self))


def _dd_linear(c: complex, j: int) -> CDD:
    """``c + j`` with the integer shift added in double-double."""
    c = complex(c)
    return CDD(DD(c.real) + DD(float(j)), DD(c.imag))


def _dd_ratio_table(num, den, w: complex, n_max: int, factorial: bool) -> list[CDD]:
    """``[R_0, ..., R_{n_max}]`` with ``R_n = w^n prod (c)_n / (prod (d)_n [n!])``.

    Built as a running product of per-step ratios so that no intermediate
    Pochhammer symbol overflows.
    """
    one = CDD(DD(1.0), DD(0.0))
    wd = CDD.from_complex(w)
    out = [one]
    for j in range(n_max):
        top = wd
        for c in num:
            top = top * _dd_linear(c, j)
        bot = one
        for d in den:
            bot = bot * _dd_linear(d, j)
        if factorial:
            bot = bot * CDD(DD(float(j + 1)), DD(0.0))
        out.append(out[-1] * (top / bot))
    return out


def _ratio_majorant(num: list[complex], den: list[complex], start: int) -> float:
    """Upper bound of ``prod |c + j| / prod |d + j|`` over all ``j >= start``.

    Numerators are paired with denominators, ``|c + j| / |d + j| <= 1 +
    |c - d| / (Re d + j)``; each unpaired denominator contributes
    ``1 / (Re d + j)``.  Unpaired numerators make the bound infinite.
    """
    if len(num) > len(den):
        return math.inf
    bound = 1.0
    for i, d in enumerate(den):
        d = complex(d)
        base = d.real + start
        if base <= 0:
            return math.inf
        if i < len(num):
            bound *= 1.0 + abs(complex(num[i]) - d) / base
        else:
            bound /= base
    return bound


def _power_ratio_majorant(a: complex, s: complex, start: int) -> float:
    """Bound of ``|(n+1+a)^-s / (n+a)^-s| = |(1 + v)^-s|``, ``v = 1/(n+a)``, ``n >= start``."""
    a, s = complex(a), complex(s)
    base = start + a.real
    if base <= 1:
        return math.inf
    vmax = 1.0 / base
    if a.imag == 0:
        # v real and positive: |(1+v)^-s| = (1+v)^-Re(s)
        return 1.0 if s.real >= 0 else (1 + vmax) ** (-s.real)
    # |Log(1+v)| <= |v| / (1 - |v|)
    return math.exp(abs(s) * vmax / (1 - vmax))


@dataclass
class OracleValue:
    value: complex
    tail_bound: float
    terms: int
    value_dd: CDD | None = None


def _rectangle_sum(
    coupled_num, coupled_den, k_num, k_den, l_num, l_den,
    x: complex, y: complex, k_max: int, l_max: int, weight, reverse_rows: bool,
):
    n_max = k_max + l_max
    a_side = _dd_ratio_table(k_num, k_den, x, k_max, True)
    b_side = _dd_ratio_table(l_num, l_den, y, l_max, True)
    c_side = [
        r * CDD.from_complex(weight(n))
        for n, r in enumerate(_dd_ratio_table(coupled_num, coupled_den, 1.0, n_max, False))
    ]

    acc = CDD(DD(), DD())
    col_k = 0.0  # sum over l of |T(k_max, l)|
    row_l = 0.0  # sum over k of |T(k, l_max)|
    corner = 0.0
    for k in range(k_max + 1):
        ls = range(l_max, -1, -1) if reverse_rows else range(l_max + 1)
        for l in ls:
            term = c_side[k + l] * a_side[k] * b_side[l]
            acc = acc + term
            if k == k_max or l == l_max:
                m = term.abs_float()
                if k == k_max:
                    col_k += m
                if l == l_max:
                    row_l += m
                if k == k_max and l == l_max:
                    corner = m
    return acc, col_k, row_l, corner


def _tail(shape, a, s, x, y, k_max, l_max, col_k, row_l, corner, weighted):
    """Bound on every term outside the rectangle.

    With ``q_k`` a majorant of ``|T(k+1, l) / T(k, l)|`` for ``k >= k_max`` and
    ``q_l`` likewise in ``l``, the omitted region splits into ``k > k_max,
    l <= l_max`` (bounded by the last column times ``q_k/(1-q_k)``) and
    ``l > l_max`` (the full last row, extended past ``k_max`` through the
    corner term, times ``q_l/(1-q_l)``).
    """
    coupled_num, coupled_den, k_num, k_den, l_num, l_den = shape
    if col_k == 0 and row_l == 0:
        return 0.0

    def q(num, den, arg, start):
        if arg == 0:
            return 0.0
        bound = _ratio_majorant(list(coupled_num), list(coupled_den), start)
        # the factorial contributes the denominator factor (1 + j)
        bound *= _ratio_majorant(list(num), list(den) + [1.0], start)
        if weighted:
            bound *= _power_ratio_majorant(a, s, start)
        return bound * abs(arg)

    q_k = q(k_num, k_den, x, k_max)
    q_l = q(l_num, l_den, y, l_max)
    if q_k >= 1 or q_l >= 1:
        raise TailBoundUnavailable(f"term-ratio majorants q_k={q_k:.3g}, q_l={q_l:.3g} not below 1")
    beyond_k = q_k / (1 - q_k)
    beyond_l = q_l / (1 - q_l)
    return col_k * beyond_k + (row_l + corner * beyond_k) * beyond_l


def _check_extent(x: complex, y: complex, k_max: int, l_max: int) -> None:
    if not (0 <= k_max <= MAX_EXTENT and 0 <= l_max <= MAX_EXTENT):
        raise ValueError(f"k_max and l_max must lie in [0, {MAX_EXTENT}]")
    if abs(x) > MAX_MODULUS or abs(y) > MAX_MODULUS:
        raise ValueError(f"oracle requires |z|, |t| <= {MAX_MODULUS}")


def oracle_phi(
    p: ParameterSet,
    pt: EvalPoint,
    k_max: int,
    l_max: int,
    reverse_rows: bool = False,
) -> OracleValue:
    """Rectangle ``[0, k_max] x [0, l_max]`` partial sum of Phi plus a tail bound.

    The bound majorises every omitted term by a geometric series in the
    term ratio, using ``|c + j| / |d + j| <= 1 + |c - d| / (Re d + j)``.
    """
    _check_extent(pt.z, pt.t, k_max, l_max)
    shape = ((p.mu,), (p.nu,), (p.eta, p.delta), (p.xi,), (p.eta_p, p.delta_p), (p.xi_p,))
    weight = lambda n: complex_power_neg_s(n + pt.a, pt.s)
    acc, col_k, row_l, corner = _rectangle_sum(*shape, pt.z, pt.t, k_max, l_max, weight, reverse_rows)
    bound = _tail(shape, pt.a, pt.s, pt.z, pt.t, k_max, l_max, col_k, row_l, corner, True)
    return OracleValue(complex(acc), bound, (k_max + 1) * (l_max + 1), acc)


def oracle_m4(
    p: ParameterSet,
    x: complex,
    y: complex,
    k_max: int,
    l_max: int,
    reverse_rows: bool = False,
) -> OracleValue:
    """Rectangle partial sum of M4 with the same tail bound construction."""
    x, y = complex(x), complex(y)
    _check_extent(x, y, k_max, l_max)
    shape = ((p.mu,), (p.nu,), (p.eta, p.delta), (p.xi,), (p.eta_p, p.delta_p), (p.xi_p,))
    acc, col_k, row_l, corner = _rectangle_sum(*shape, x, y, k_max, l_max, lambda n: 1.0, reverse_rows)
    bound = _tail(shape, 0j, 0j, x, y, k_max, l_max, col_k, row_l, corner, False)
    return OracleValue(complex(acc), bound, (k_max + 1) * (l_max + 1), acc)


__all__ = ["CDD", "DD", "OracleValue", "TailBoundUnavailable", "oracle_m4", "oracle_phi"]
