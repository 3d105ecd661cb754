"""Shared types, error classes and scalar primitives.

Everything here is a pure function of its arguments.  Complex powers use the
principal branch of the logarithm (imaginary part in ``(-pi, pi]``) so that
values produced by different evaluation routes are directly comparable.
"""

from __future__ import annotations

import cmath
import enum
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import special

POCHHAMMER_DIRECT_MAX = 64


class HLZetaError(Exception):
    """Base class for library errors."""


class DomainError(HLZetaError, ValueError):
    """Inputs lie outside the region where the requested representation holds."""


class PoleError(DomainError):
    """Evaluation at a pole of the gamma function."""


class NoConvergence(HLZetaError, ArithmeticError):
    """A series hit its term cap before meeting the tolerance.

    ``result`` carries the partial :class:`EvalResult` (``converged=False``).
    """

    def __init__(self, message: str, result: "EvalResult | None" = None):
        super().__init__(message)
        self.result = result


class QuadratureFailure(HLZetaError, ArithmeticError):
    """Quadrature refinement exhausted ``max_levels``."""

    def __init__(self, message: str, result: "EvalResult | None" = None):
        super().__init__(message)
        self.result = result


class Method(str, enum.Enum):
    DoubleSeries = "DoubleSeries"
    Diagonal = "Diagonal"
    QuadM4 = "QuadM4"
    QuadBeta1D = "QuadBeta1D"
    QuadBeta2D = "QuadBeta2D"
    ClosedKernel = "ClosedKernel"
    Dispatch = "Dispatch"


def is_nonpositive_integer(c: complex) -> bool:
    c = complex(c)
    return c.imag == 0.0 and c.real <= 0.0 and c.real == math.floor(c.real)


def _as_finite_complex(name: str, value) -> complex:
    try:
        c = complex(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} is not a number: {value!r}") from exc
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise DomainError(f"{name} must be finite, got {c!r}")
    return c


PARAMETER_NAMES = ("mu", "eta", "eta_p", "delta", "delta_p", "nu", "xi", "xi_p")
POINT_NAMES = ("z", "t", "s", "a")


@dataclass(frozen=True)
class ParameterSet:
    """The eight parameters ``mu, eta, eta', delta, delta'; nu, xi, xi'``.

    ``nu``, ``xi`` and ``xi_p`` sit in denominator Pochhammer symbols and may
    not be non-positive integers.
    """

    mu: complex
    eta: complex
    eta_p: complex
    delta: complex
    delta_p: complex
    nu: complex
    xi: complex
    xi_p: complex

    def __post_init__(self):
        for name in PARAMETER_NAMES:
            object.__setattr__(self, name, _as_finite_complex(name, getattr(self, name)))
        for name in ("nu", "xi", "xi_p"):
            if is_nonpositive_integer(getattr(self, name)):
                raise DomainError(f"{name} must not be a non-positive integer")

    def swapped(self) -> "ParameterSet":
        """Exchange the z-side and t-side parameters."""
        return replace(
            self,
            eta=self.eta_p, eta_p=self.eta,
            delta=self.delta_p, delta_p=self.delta,
            xi=self.xi_p, xi_p=self.xi,
        )

    def as_dict(self) -> dict[str, complex]:
        return {name: getattr(self, name) for name in PARAMETER_NAMES}


@dataclass(frozen=True)
class EvalPoint:
    """Arguments ``(z, t, s, a)``; ``a`` may not be a non-positive integer."""

    z: complex
    t: complex
    s: complex
    a: complex

    def __post_init__(self):
        for name in POINT_NAMES:
            object.__setattr__(self, name, _as_finite_complex(name, getattr(self, name)))
        if is_nonpositive_integer(self.a):
            raise DomainError("a must not be a non-positive integer")

    @property
    def interior(self) -> bool:
        return abs(self.z) < 1.0 and abs(self.t) < 1.0

    def swapped(self) -> "EvalPoint":
        return replace(self, z=self.t, t=self.z)


@dataclass
class EvalResult:
    value: complex
    abs_err_estimate: float
    work: int
    method: Method
    converged: bool = True


def _env_max_diagonal(default: int = 20000) -> int:
    raw = os.environ.get("HLZETA_MAX_DIAGONAL")
    if raw is None or not raw.strip():
        return default
    return int(raw)


@dataclass(frozen=True)
class SeriesConfig:
    tol: float = 1e-10
    max_diagonal: int = 20000
    stall_count: int = 3

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_diagonal < 1:
            raise ValueError("max_diagonal must be >= 1")
        if self.stall_count < 1:
            raise ValueError("stall_count must be >= 1")

    @classmethod
    def from_env(cls, **kwargs) -> "SeriesConfig":
        """Build a config honouring ``HLZETA_MAX_DIAGONAL``."""
        kwargs.setdefault("max_diagonal", _env_max_diagonal())
        return cls(**kwargs)


@dataclass(frozen=True)
class QuadConfig:
    """Quadrature settings.

    ``tail_cut`` is the upper limit ``X`` replacing infinity in the Mellin-type
    integrals.  ``None`` selects it automatically: start from
    ``X = -ln(tol * Re a) / Re a`` and enlarge until the incomplete-gamma bound
    on the discarded tail, scaled by the kernel magnitude, is below ``tol/10``.
    """

    tol: float = 1e-8
    max_levels: int = 8
    tail_cut: float | None = field(default=None)

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_levels < 1:
            raise ValueError("max_levels must be >= 1")
        if self.tail_cut is not None and not self.tail_cut > 0:
            raise ValueError("tail_cut must be positive")


def log_gamma(c: complex) -> complex:
    """Principal-branch ``log Gamma(c)``."""
    c = complex(c)
    if is_nonpositive_integer(c):
        raise PoleError(f"log_gamma has a pole at {c.real:g}")
    return complex(special.loggamma(c))


def log_pochhammer(c: complex, n: int) -> complex:
    """``log((c)_n)`` up to a multiple of ``2*pi*i``; ``-inf`` when ``(c)_n = 0``."""
    c = complex(c)
    if n == 0:
        return 0j
    if is_nonpositive_integer(c):
        m = int(-c.real)
        if n > m:
            return complex(-math.inf, 0.0)
        # (c)_n = (-1)^n (1-c-n)_n for c = -m, n <= m
        return complex(0.0, math.pi * (n % 2)) + log_pochhammer(1 - c - n, n)
    return complex(special.loggamma(c + n) - special.loggamma(c))


def pochhammer(c: complex, n: int) -> complex:
    """Rising factorial ``(c)_n = c (c+1) ... (c+n-1)``.

    Direct product for ``n <= 64``; above that the log-gamma ratio, which
    keeps large arguments from overflowing the intermediate product.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    c = complex(c)
    if n <= POCHHAMMER_DIRECT_MAX:
        out = 1 + 0j
        for j in range(n):
            out *= c + j
        return out
    lp = log_pochhammer(c, n)
    if lp.real == -math.inf:
        return 0j
    return cmath.exp(lp)


def principal_log(base: complex) -> complex:
    base = complex(base)
    if base.imag == 0.0:
        # drop a signed zero so negative reals map to +i*pi
        base = complex(base.real, 0.0)
    return cmath.log(base)


def complex_power_neg_s(base: complex, s: complex) -> complex:
    """``base ** (-s)`` on the principal branch."""
    base = complex(base)
    if base == 0:
        raise DomainError("complex_power_neg_s: base must be nonzero")
    s = complex(s)
    if s == 0:
        return 1 + 0j
    if base.imag == 0.0 and base.real > 0.0 and s.imag == 0.0:
        return complex(base.real ** (-s.real))
    return cmath.exp(-s * principal_log(base))


def power_neg_s_array(base: np.ndarray, s: complex) -> np.ndarray:
    """Vectorised principal-branch ``base ** (-s)``."""
    base = np.asarray(base, dtype=complex)
    return np.exp(-complex(s) * np.log(base + 0j))


def rgamma(c: complex) -> complex:
    """``1/Gamma(c)``, zero at the poles."""
    return complex(special.rgamma(complex(c)))
