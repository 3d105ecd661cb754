"""Hypergeometric evaluators against mpmath and against each other."""

import itertools
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hlzeta.core import DomainError, NoConvergence, ParameterSet, SeriesConfig
from hlzeta.hypfun import (
    appell_f1_rows,
    diagonal_double_sum,
    eval_appell_f1,
    eval_humbert_phi1,
    eval_humbert_phi2,
    eval_humbert_phi3,
    eval_m4,
    eval_pfq,
    m4_closed_form,
    pfq_sum,
)
from hlzeta.oracle import oracle_m4

TIGHT = SeriesConfig(tol=1e-15)


def mp_complex(v) -> complex:
    return complex(v)


class TestPfq:
    def test_binomial(self):
        r = eval_pfq([2], [], 0.5)
        # default tol is 1e-10 scaled by max(1, |sum|)
        assert abs(r.value - 4.0) <= 1e-10 * 4.0
        assert eval_pfq([2], [], 0.5, TIGHT).value == pytest.approx(4.0, rel=1e-14)

    def test_log_closed_form(self):
        r = eval_pfq([1, 1], [2], 0.5)
        assert r.value.real == pytest.approx(2 * math.log(2), abs=1e-10)
        assert r.converged and r.abs_err_estimate < 1e-9

    @pytest.mark.parametrize("num", [[0], [0, 3.5], [2, 0, 1]])
    def test_zero_numerator_terminates_at_once(self, num):
        r = eval_pfq(num, [1.5], 0.9)
        assert r.value == 1 and r.converged

    def test_terminating_polynomial_exact(self):
        # 2F1(-3, b; c; z) is a cubic
        b, c, z = 1.5, 2.5, 0.7
        want = sum(math.comb(3, n) * (-1) ** n * mp.rf(b, n) / mp.rf(c, n) * z**n for n in range(4))
        assert eval_pfq([-3, b], [c], z).value.real == pytest.approx(float(want), rel=1e-15)

    def test_terminating_series_with_large_argument(self):
        # p > q + 1 and |z| > 1 are both fine once the series terminates
        r = eval_pfq([-4, 2, 3], [1.5], 5.0)
        want = mp.hyper([-4, 2, 3], [1.5], 5.0)
        assert r.value.real == pytest.approx(float(want), rel=1e-13)

    def test_denominator_pole_after_termination_is_allowed(self):
        # (-5)_n never reached: series stops at n = 2
        r = eval_pfq([-2, 1], [-5], 0.3)
        want = 1 + (-2) * 1 / (-5) * 0.3 + (-2) * (-1) * 1 * 2 / ((-5) * (-4) * 2) * 0.09
        assert r.value.real == pytest.approx(want, rel=1e-15)

    def test_denominator_pole_rejected(self):
        with pytest.raises(DomainError):
            eval_pfq([1, 1], [-2], 0.3)

    def test_divergent_shape_rejected(self):
        with pytest.raises(DomainError):
            eval_pfq([1, 1, 1], [2], 0.1)

    def test_outside_unit_disc_rejected(self):
        with pytest.raises(DomainError):
            eval_pfq([1, 1], [2], 1.2)

    def test_no_convergence(self):
        with pytest.raises(NoConvergence) as info:
            eval_pfq([1, 1], [2], 0.999, SeriesConfig(tol=1e-12, max_diagonal=50))
        assert info.value.result is not None and not info.value.result.converged

    @pytest.mark.parametrize(
        "num, den, z",
        [
            ([0.5, 1.25], [2.2], 0.6 + 0.3j),
            ([1.5], [0.7], -8.0),
            ([2.0 + 1j], [3.0, 0.5 - 0.5j], 4.0 - 2j),
            ([0.3, 0.4, 0.5], [1.1, 1.2], -0.8),
            ([], [1.5], 3.0),
        ],
    )
    def test_against_mpmath(self, num, den, z):
        got = eval_pfq(num, den, z, TIGHT).value
        want = mp_complex(mp.hyper(num, den, z))
        # rounding is bounded by the sum of term magnitudes (condition number)
        size = float(mp.hyper([abs(c) for c in num], [d.real if isinstance(d, complex) else d for d in den], abs(z)))
        assert abs(got - want) <= 1e-13 * max(1.0, abs(want)) + 50 * 2.2e-16 * size

    def test_vectorised_matches_scalar(self):
        zs = np.array([0.1, -0.5, 0.3 + 0.4j, 0.0])
        vec = pfq_sum([1.2, 0.7], [2.5], zs, TIGHT)
        for z, v in zip(zs, np.atleast_1d(vec.value)):
            assert v == pytest.approx(eval_pfq([1.2, 0.7], [2.5], z, TIGHT).value, rel=1e-14)


class TestAppellF1:
    def test_origin(self):
        assert eval_appell_f1(1.3, 0.2, 2.0, 1.7, 0, 0).value == 1

    def test_t_zero_collapse(self):
        a, b, bp, c, z = 1.3, 0.8, 2.0, 2.7, 0.45
        assert eval_appell_f1(a, b, bp, c, z, 0).value == pytest.approx(eval_pfq([a, b], [c], z).value, rel=1e-12)

    def test_zero_bprime_collapse(self):
        a, b, c = 1.3, 0.8, 2.7
        got = eval_appell_f1(a, b, 0, c, 0.3, 0.7).value
        assert got == pytest.approx(eval_pfq([a, b], [c], 0.3).value, rel=1e-12)

    @pytest.mark.parametrize(
        "a, b, bp, c, z, t",
        [
            (1.3, 0.8, 2.0, 2.7, 0.45, -0.3),
            (0.5, 1.5, 0.25, 1.1, 0.2 + 0.2j, 0.6),
            (2.0, 1.0, 1.0, 3.5, -0.7, -0.7),
        ],
    )
    def test_against_mpmath(self, a, b, bp, c, z, t):
        want = mp_complex(mp.appellf1(a, b, bp, c, z, t))
        got = eval_appell_f1(a, b, bp, c, z, t, TIGHT).value
        assert abs(got - want) <= 1e-12 * abs(want)

    @pytest.mark.parametrize("z, t", [(0.3, 0.4), (-0.5, 0.2), (0.1 + 0.3j, -0.45)])
    def test_row_expansion_agrees(self, z, t):
        args = (1.7, 0.6, 1.2, 2.9)
        diag = eval_appell_f1(*args, z, t, TIGHT).value
        rows = appell_f1_rows(*args, z, t, TIGHT).value
        assert abs(diag - rows) <= 1e-10 * abs(diag)

    def test_region_uses_modulus(self):
        # Re(z) < 1 but |z| > 1 is outside the double-series region
        with pytest.raises(DomainError):
            eval_appell_f1(1, 1, 1, 2, 0.5 + 1j, 0.1)


class TestHumbert:
    def test_phi2_origin(self):
        assert eval_humbert_phi2(1.5, 0.5, 2.0, 0, 0).value == 1

    def test_phi3_collapse_to_1f1(self):
        got = eval_humbert_phi3(1.4, 2.3, 1.7, 0).value
        assert got == pytest.approx(eval_pfq([1.4], [2.3], 1.7).value, rel=1e-12)

    def test_phi1_collapse_to_2f1(self):
        got = eval_humbert_phi1(1.4, 0.6, 2.3, 0.55, 0).value
        assert got == pytest.approx(eval_pfq([1.4, 0.6], [2.3], 0.55).value, rel=1e-12)

    def test_phi1_needs_unit_disc_in_z_only(self):
        eval_humbert_phi1(1.4, 0.6, 2.3, 0.5, 6.0)
        with pytest.raises(DomainError):
            eval_humbert_phi1(1.4, 0.6, 2.3, 1.5, 0.1)

    @pytest.mark.parametrize("z, t", [(0.4, 2.5), (-0.6, -1.5), (0.2 + 0.3j, 0.7j)])
    def test_phi1_against_mpmath(self, z, t):
        a, b, c = 1.4, 0.6, 2.3
        want = mp_complex(mp.hyper2d({"m+n": [a], "m": [b]}, {"m+n": [c]}, z, t))
        assert abs(eval_humbert_phi1(a, b, c, z, t, TIGHT).value - want) <= 1e-12 * abs(want)

    @pytest.mark.parametrize("z, t", [(1.5, 2.5), (-3.0, 0.5), (1j, -2.0)])
    def test_phi2_against_mpmath(self, z, t):
        b, bp, c = 1.4, 0.6, 2.3
        want = mp_complex(mp.hyper2d({"m": [b], "n": [bp]}, {"m+n": [c]}, z, t))
        assert abs(eval_humbert_phi2(b, bp, c, z, t, TIGHT).value - want) <= 1e-12 * abs(want)

    @pytest.mark.parametrize("z, t", [(1.5, 2.5), (-3.0, 0.5), (0.5 - 1j, -2.0)])
    def test_phi3_against_mpmath(self, z, t):
        b, c = 0.9, 1.8
        want = mp_complex(mp.hyper2d({"m": [b]}, {"m+n": [c]}, z, t))
        assert abs(eval_humbert_phi3(b, c, z, t, TIGHT).value - want) <= 1e-12 * abs(want)


M4_GENERIC = ParameterSet(2, 1.5, 0.5, 1.2, 0.8, 3, 2.2, 1.7)
# mpmath, 40 digits, 160 diagonals
M4_GENERIC_AT = (0.5, -0.35, 1.3399045137075546423)


class TestM4:
    def test_origin(self):
        assert eval_m4(M4_GENERIC, 0, 0).value == 1

    def test_frozen_reference(self):
        x, y, want = M4_GENERIC_AT
        assert eval_m4(M4_GENERIC, x, y, TIGHT).value.real == pytest.approx(want, rel=1e-14)

    def test_against_mpmath_complex(self):
        p = ParameterSet(1.1 + 0.5j, 0.7, 1.9, 2.1 - 0.3j, 0.4, 2.6, 1.3, 3.2 + 1j)
        x, y = 0.3 - 0.4j, 0.55
        want = mp_complex(mp.hyper2d(
            {"m+n": [p.mu], "m": [p.eta, p.delta], "n": [p.eta_p, p.delta_p]},
            {"m+n": [p.nu], "m": [p.xi], "n": [p.xi_p]},
            x, y,
        ))
        assert abs(eval_m4(p, x, y, TIGHT).value - want) <= 1e-12 * abs(want)

    def test_closed_form_example(self):
        p = ParameterSet(2.5, 1, 2, 1.5, 0.5, 2.5, 1.5, 0.5)
        assert eval_m4(p, 0.5, 0.25, TIGHT).value == pytest.approx(32 / 9, rel=1e-11)
        assert m4_closed_form(1, 2, 0.5, 0.25) == pytest.approx(32 / 9, rel=1e-15)

    def test_eta_zero_terminates_k_side(self):
        p = ParameterSet(2.5, 0, 1.75, 1.5, 0.5, 2.5, 1.5, 0.5)
        assert eval_m4(p, 0.9, 0.4, TIGHT).value == pytest.approx(0.6 ** -1.75, rel=1e-12)

    def test_closed_form_trivial_cases(self):
        assert m4_closed_form(1.3, 2.2, 0, 0) == 1
        assert m4_closed_form(0, 2.2, 0.8, 0.3) == pytest.approx(0.7 ** -2.2, rel=1e-15)
        with pytest.raises(DomainError):
            m4_closed_form(1, 1, 1, 0.5)

    @pytest.mark.parametrize(
        "x, y, eta, eta_p",
        list(itertools.product((0.1, 0.7), (0.3, 0.5), (0.5, 2.5), (1.0,))),
    )
    def test_closed_form_grid_sample(self, x, y, eta, eta_p):
        p = ParameterSet(1.7, eta, eta_p, 2.2, 0.9, 1.7, 2.2, 0.9)
        want = m4_closed_form(eta, eta_p, x, y)
        assert abs(eval_m4(p, x, y, TIGHT).value - want) <= 1e-11 * abs(want)

    def test_needs_unit_disc(self):
        with pytest.raises(DomainError):
            eval_m4(M4_GENERIC, 1.0, 0.2)

    @given(
        x=st.floats(-0.5, 0.5), y=st.floats(-0.5, 0.5),
        vals=st.lists(st.floats(0.5, 3.0), min_size=8, max_size=8),
    )
    def test_swap_symmetry(self, x, y, vals):
        p = ParameterSet(*vals)
        a = eval_m4(p, x, y, TIGHT).value
        b = eval_m4(p.swapped(), y, x, TIGHT).value
        assert abs(a - b) <= 1e-12 * abs(a)

    @pytest.mark.parametrize("x, y", [(0.5, 0.5), (-0.5, 0.3), (0.2, -0.45)])
    def test_diagonal_equals_row_by_row_oracle(self, x, y):
        ref = oracle_m4(M4_GENERIC, x, y, 90, 90)
        got = eval_m4(M4_GENERIC, x, y, TIGHT).value
        assert abs(got - ref.value) <= 1e-10 * abs(ref.value) + ref.tail_bound


class TestDiagonalEngine:
    def test_positive_terms_partial_sums_nondecreasing(self):
        # increasing caps give a nondecreasing sequence of partial sums
        sums = []
        for cap in (1, 2, 4, 8, 16, 32):
            raw = diagonal_double_sum([2.0], [3.0], [1.5, 1.2], [2.2], [0.5, 0.8], [1.7], 0.6, 0.5,
                                      SeriesConfig(tol=1e-300, max_diagonal=cap))
            sums.append(raw.value.real)
        assert all(b >= a for a, b in zip(sums, sums[1:]))

    def test_large_mu_scaled_without_overflow(self):
        # (mu)_n z^n stays finite when z is rescaled by mu
        mu = 1e6
        raw = diagonal_double_sum([mu], [2.0], [1.0], [], [], [], 0.5 / mu, 0.0, TIGHT)
        # -> sum (0.5)^k / (2)_k * k!/k! ... = 1F1(1; 2; 0.5) in the limit
        assert raw.value.real == pytest.approx(float(mp.hyp1f1(1, 2, 0.5)), rel=1e-5)

    def test_terminating_coupled_parameter(self):
        raw = diagonal_double_sum([-2.0], [1.5], [], [], [], [], 0.3, 0.4, TIGHT)
        # (-2)_n / (1.5)_n (z + t)^n / n! for n <= 2
        w = 0.7
        want = 1 + (-2) / 1.5 * w + (-2) * (-1) / (1.5 * 2.5) * w * w / 2
        assert raw.value.real == pytest.approx(want, rel=1e-14)
