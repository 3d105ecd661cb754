"""Series representations of Phi, its limits, reductions and the shift formula."""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hlzeta.core import DomainError, EvalPoint, NoConvergence, ParameterSet, SeriesConfig
from hlzeta.oracle import oracle_phi
from hlzeta.verify import limit_rescaled, reduced_outer_series
from hlzeta.zeta import (
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

TIGHT = SeriesConfig(tol=1e-15)
ONES = ParameterSet(1, 1, 1, 1, 1, 1, 1, 1)
GENERIC = ParameterSet(2, 1.5, 0.5, 1.2, 0.8, 3, 2.2, 1.7)
GENERIC_PT = EvalPoint(0.4, 0.3, 2, 1.5)

# 40-digit mpmath sums over 160 diagonals
FROZEN = [
    (GENERIC, GENERIC_PT, 0.49418685854931364553),
    (GENERIC, EvalPoint(0.4, 0.3, 0.5, 0.7), 1.4585225109056530641),
    (
        ParameterSet(2 + 1j, 1.5, 0.5 - 0.3j, 1.2, 0.8, 3, 2.2, 1.7),
        EvalPoint(0.4j, -0.5, 2 - 1j, 1.5 + 0.5j),
        complex(0.25092513998945845134, -0.045950620561496827927),
    ),
]

params = st.lists(st.floats(0.5, 3.0), min_size=8, max_size=8).map(lambda v: ParameterSet(*v))
args = st.floats(-0.6, 0.6)


class TestDoubleSeries:
    def test_power_law_point(self):
        r = eval_phi_double_series(GENERIC, EvalPoint(0, 0, 2, 4))
        assert r.value == 0.0625 and r.work == 1

    def test_classical_log(self):
        r = eval_phi_double_series(ONES, EvalPoint(0.5, 0, 1, 1))
        assert abs(r.value - 2 * math.log(2)) <= 1e-10

    @pytest.mark.parametrize("p, pt, want", FROZEN)
    def test_frozen_values(self, p, pt, want):
        r = eval_phi_double_series(p, pt, TIGHT)
        assert abs(r.value - want) <= 1e-14
        assert r.converged

    def test_error_estimate_covers_error(self):
        p, pt, want = FROZEN[0]
        for tol in (1e-4, 1e-7, 1e-10):
            r = eval_phi_double_series(p, pt, SeriesConfig(tol=tol))
            assert abs(r.value - want) <= max(r.abs_err_estimate, 1e-15)
            assert abs(r.value - want) <= tol

    def test_boundary_zeta2_slow_but_honest(self):
        # on |z| = 1 the tail decays like 1/n, so only modest tolerances are reachable
        pt = EvalPoint(1, 0, 2, 1)
        r = eval_phi_double_series(ONES, pt, SeriesConfig(tol=1e-4))
        err = abs(r.value - math.pi**2 / 6)
        assert err <= 2e-4 and err <= 1.5 * r.abs_err_estimate

    def test_boundary_no_convergence_carries_partial(self):
        with pytest.raises(NoConvergence) as info:
            eval_phi_double_series(ONES, EvalPoint(1, 0, 2, 1), SeriesConfig(tol=1e-10, max_diagonal=500))
        partial = info.value.result
        assert not partial.converged
        # the reported bound is the last tail estimate, not the tolerance
        assert partial.abs_err_estimate > 1e-10
        assert abs(partial.value - math.pi**2 / 6) <= partial.abs_err_estimate

    @pytest.mark.parametrize(
        "p, pt",
        [
            (ONES, EvalPoint(1, 0, 1, 1)),          # margin 0: harmonic series
            (ONES, EvalPoint(1, 0, 1.4, 1)),        # margin 0.4 < 0.5
            (ONES, EvalPoint(1.01, 0, 3, 1)),
            (GENERIC, EvalPoint(0.3, -1.2, 2, 1)),
        ],
    )
    def test_domain(self, p, pt):
        with pytest.raises(DomainError):
            eval_phi_double_series(p, pt)

    def test_boundary_with_margin_accepted(self):
        # margin Re(s + nu + xi - mu - eta - delta) = 2.5 + 2 + 2 - 1 - 1 - 1 = 3.5
        p = ParameterSet(1, 1, 1, 1, 1, 2, 2, 1)
        r = eval_phi_double_series(p, EvalPoint(1, 0, 2.5, 1), SeriesConfig(tol=1e-8))
        want = mp.nsum(lambda k: mp.rf(1, k) ** 2 / (mp.rf(2, k) ** 2) / (k + 1) ** 2.5, [0, mp.inf])
        assert r.value.real == pytest.approx(float(want), abs=1e-7)

    def test_partial_sums_monotone_for_positive_terms(self):
        prev = -math.inf
        for cap in (1, 3, 9, 27):
            try:
                v = eval_phi_double_series(GENERIC, GENERIC_PT, SeriesConfig(tol=1e-300, max_diagonal=cap)).value
            except NoConvergence as exc:
                v = exc.result.value
            assert v.real >= prev
            prev = v.real

    @given(p=params, z=args, t=args, s=st.floats(0.5, 3), a=st.floats(0.3, 3))
    def test_swap_symmetry(self, p, z, t, s, a):
        pt = EvalPoint(z, t, s, a)
        lhs = eval_phi_double_series(p, pt, TIGHT).value
        rhs = eval_phi_double_series(p.swapped(), pt.swapped(), TIGHT).value
        assert abs(lhs - rhs) <= 1e-12 * abs(lhs)

    def test_nonpositive_integer_mu_terminates(self):
        p = ParameterSet(-2, 1, 1, 1, 1, 1, 1, 1)
        # (-2)_n / (1)_n * sum_{k+l=n} z^k t^l / (n+a)^s, n <= 2
        z, t, s, a = 0.3, 0.2, 1.5, 2.0
        want = a**-s - 2 * (z + t) * (1 + a) ** -s + (z * z + z * t + t * t) * (2 + a) ** -s
        r = eval_phi_double_series(p, EvalPoint(z, t, s, a))
        assert r.value.real == pytest.approx(want, rel=1e-14)


class TestDiagonal:
    def test_generic_matches_double_series(self):
        d = eval_phi_diagonal(GENERIC, GENERIC_PT).value
        ds = eval_phi_double_series(GENERIC, GENERIC_PT).value
        assert abs(d - ds) <= 1e-10

    def test_t_zero_matches(self):
        pt = EvalPoint(0.55, 0, 1.5, 0.8)
        d = eval_phi_diagonal(GENERIC, pt, TIGHT).value
        ds = eval_phi_double_series(GENERIC, pt, TIGHT).value
        assert abs(d - ds) <= 1e-14

    def test_first_term_is_power(self):
        r = eval_phi_diagonal(ParameterSet(0, 1, 1, 1, 1, 1, 1, 1), EvalPoint(0.5, 0.5, 2, 3))
        assert r.value == pytest.approx(3**-2, rel=1e-15)

    def test_z_zero_rejected(self):
        with pytest.raises(DomainError):
            eval_phi_diagonal(GENERIC, EvalPoint(0, 0.3, 2, 1))

    @pytest.mark.parametrize("z, t", [(0.05, 0.6), (1e-3, 0.5), (-0.6, 0.02), (0.3j, 0.5)])
    def test_small_z_relative_to_t(self, z, t):
        pt = EvalPoint(z, t, 2, 1.5)
        d = eval_phi_diagonal(GENERIC, pt, TIGHT).value
        ds = eval_phi_double_series(GENERIC, pt, TIGHT).value
        assert abs(d - ds) <= 1e-13 * max(1, abs(ds))

    @pytest.mark.parametrize("p, pt, want", FROZEN)
    def test_hypergeometric_inner_form(self, p, pt, want):
        r = eval_phi_diagonal(p, pt, TIGHT, inner="pfq")
        assert abs(r.value - want) <= 1e-13

    @pytest.mark.parametrize("eta, delta", [(2.0, 1.3), (1.3, 3.0)])
    def test_hypergeometric_inner_form_positive_integers(self, eta, delta):
        # (1 - eta - k)_l stays nonzero for l <= k when eta is a positive integer
        p = ParameterSet(2, eta, 0.5, delta, 0.8, 3, 2.2, 1.7)
        want = eval_phi_double_series(p, GENERIC_PT, TIGHT).value
        assert abs(eval_phi_diagonal(p, GENERIC_PT, TIGHT, inner="pfq").value - want) <= 1e-13

    @pytest.mark.parametrize("eta, delta", [(-1.0, 1.3), (1.3, 0.0), (-2.0, -3.0)])
    def test_hypergeometric_inner_form_poles(self, eta, delta):
        # a non-positive integer eta or delta makes (1 - eta - k)_l vanish inside the range
        p = ParameterSet(2, eta, 0.5, delta, 0.8, 3, 2.2, 1.7)
        with pytest.raises(DomainError):
            eval_phi_diagonal(p, GENERIC_PT, inner="pfq")
        # the direct inner sum has no such artifact
        d = eval_phi_diagonal(p, GENERIC_PT, TIGHT).value
        assert abs(d - eval_phi_double_series(p, GENERIC_PT, TIGHT).value) <= 1e-14

    @pytest.mark.parametrize("seed", range(5))
    def test_against_oracle(self, seed):
        rng = np.random.default_rng(100 + seed)
        p = ParameterSet(*rng.uniform(0.5, 3.0, 5), *rng.uniform(1.0, 4.0, 3))
        pt = EvalPoint(*rng.uniform(-0.6, 0.6, 2), rng.uniform(1, 3), rng.uniform(0.5, 2.5))
        ref = oracle_phi(p, pt, 70, 70)
        d = eval_phi_diagonal(p, pt, TIGHT).value
        assert abs(d - ref.value) <= 1e-13 + ref.tail_bound


class TestLimitCases:
    def test_mu_inf_at_origin(self):
        r = eval_phi_limit_case(GENERIC, LimitVariant.MuInf, EvalPoint(0, 0, 1.5, 2))
        assert r.value == pytest.approx(2**-1.5, rel=1e-15)

    def test_full_variant_is_the_double_series(self):
        a = eval_phi_limit_case(GENERIC, LimitVariant.Full, GENERIC_PT, TIGHT).value
        assert a == eval_phi_double_series(GENERIC, GENERIC_PT, TIGHT).value

    def test_case5_equals_case4_when_t_zero(self):
        pt = EvalPoint(0.7, 0, 2, 1.2)
        c4 = eval_phi_limit_case(GENERIC, LimitVariant.MuInf, pt, TIGHT).value
        c5 = eval_phi_limit_case(GENERIC, LimitVariant.MuAndEtaPrimeInf, pt, TIGHT).value
        assert c4 == pytest.approx(c5, rel=1e-15)

    @pytest.mark.parametrize("variant", list(LimitVariant)[1:])
    def test_rescaled_full_series_converges(self, variant):
        limit = eval_phi_limit_case(GENERIC, variant, GENERIC_PT, TIGHT).value
        q, qpt = limit_rescaled(GENERIC, variant, GENERIC_PT, 1e6)
        full = eval_phi_double_series(q, qpt, TIGHT).value
        assert abs(full - limit) <= 1e-5 * abs(limit)

    def test_mu_inf_is_entire_in_both_variables(self):
        r = eval_phi_limit_case(GENERIC, LimitVariant.MuInf, EvalPoint(3.0, -2.0, 1, 1), TIGHT)
        assert r.converged

    def test_eta_prime_inf_is_entire_in_t_only(self):
        eval_phi_limit_case(GENERIC, LimitVariant.EtaPrimeInf, EvalPoint(0.3, 4.0, 2, 1), TIGHT)
        with pytest.raises(DomainError):
            eval_phi_limit_case(GENERIC, LimitVariant.EtaPrimeInf, EvalPoint(1.5, 0.1, 2, 1))


class TestReductions:
    @pytest.mark.parametrize(
        "p, pt, tag",
        [
            (GENERIC, EvalPoint(0, 0, 2, 1), ReductionTag.PowerLaw),
            (GENERIC, GENERIC_PT, ReductionTag.General),
            (ParameterSet(2, 1.5, 0.5, 2.2, 1.7, 3, 2.2, 1.7), GENERIC_PT, ReductionTag.ChoiParmar),
            (ParameterSet(3, 1.5, 0.5, 2.2, 1.7, 3, 2.2, 1.7), GENERIC_PT, ReductionTag.PathanDaman),
            (ONES, EvalPoint(0.5, 0, 1, 1), ReductionTag.ClassicalPhi),
            (ParameterSet(3, 2, 1, 2.2, 1.7, 3, 2.2, 1.7), EvalPoint(0, 0.5, 1, 1), ReductionTag.ClassicalPhi),
            (ParameterSet(3, 2, 1, 2.2, 1.7, 3, 2.2, 1.7), EvalPoint(0.5, 0, 1, 1), ReductionTag.PathanDaman),
        ],
    )
    def test_classify(self, p, pt, tag):
        assert classify_reduction(p, pt) is tag

    def test_classification_uses_exact_equality(self):
        p = ParameterSet(2, 1.5, 0.5, 2.2 + 1e-15, 1.7, 3, 2.2, 1.7)
        assert classify_reduction(p, GENERIC_PT) is ReductionTag.General

    def test_choi_parmar_series(self):
        p = ParameterSet(2, 1.5, 0.5, 2.2, 1.7, 3, 2.2, 1.7)
        full = eval_phi_double_series(p, GENERIC_PT, TIGHT).value
        cp = eval_choi_parmar(2, 1.5, 0.5, 3, GENERIC_PT, TIGHT).value
        assert abs(full - cp) <= 1e-11 * abs(full)

    def test_pathan_daman_series(self):
        p = ParameterSet(3, 1.5, 0.5, 2.2, 1.7, 3, 2.2, 1.7)
        full = eval_phi_double_series(p, GENERIC_PT, TIGHT).value
        pd = eval_pathan_daman(1.5, 0.5, GENERIC_PT, TIGHT).value
        assert abs(full - pd) <= 1e-11 * abs(full)

    @pytest.mark.parametrize("z, s, a", [(0.5, 1, 1), (-0.7, 2.5, 0.3), (0.3 + 0.4j, 1.5 - 0.5j, 2 + 1j)])
    def test_classical_phi_against_mpmath(self, z, s, a):
        want = complex(mp.lerchphi(z, s, a))
        got = eval_classical_phi(z, s, a, TIGHT).value
        assert abs(got - want) <= 1e-13 * abs(want)

    def test_classical_reduction_from_full(self):
        got = eval_phi_double_series(ONES, EvalPoint(0.5, 0, 1, 1), TIGHT).value
        assert got == pytest.approx(eval_classical_phi(0.5, 1, 1, TIGHT).value, rel=1e-14)

    def test_reduced_outer_forms(self):
        b = GENERIC
        p4 = ParameterSet(b.mu, b.eta, b.eta_p, b.xi, b.delta_p, b.nu, b.xi, b.xi_p)
        p5 = ParameterSet(b.mu, b.eta, b.eta_p, b.xi, b.xi_p, b.eta, b.xi, b.xi_p)
        for p, form in ((p4, "3f2"), (p5, "2f1")):
            want = eval_phi_double_series(p, GENERIC_PT, TIGHT).value
            assert abs(reduced_outer_series(p, GENERIC_PT, form) - want) <= 1e-13


class TestSummationFormula:
    def test_x_zero_is_phi(self):
        r = summation_formula_lhs(GENERIC, GENERIC_PT, 0, 40, TIGHT)
        assert r.value == eval_phi_diagonal(GENERIC, GENERIC_PT, TIGHT).value

    def test_r_max_zero_is_phi(self):
        r = summation_formula_lhs(GENERIC, GENERIC_PT, 0.3, 0, TIGHT)
        assert r.value == eval_phi_diagonal(GENERIC, GENERIC_PT, TIGHT).value

    def test_generic_shift(self):
        lhs = summation_formula_lhs(GENERIC, GENERIC_PT, 0.3, 40).value
        rhs = eval_phi_double_series(GENERIC, EvalPoint(0.4, 0.3, 2, 1.2), TIGHT).value
        assert abs(lhs - rhs) <= 1e-9

    def test_residual_decreases(self):
        rhs = eval_phi_double_series(GENERIC, EvalPoint(0.4, 0.3, 2, 0.75), TIGHT).value
        res = [abs(summation_formula_lhs(GENERIC, GENERIC_PT, 0.75, r, TIGHT).value - rhs) for r in (5, 15, 30, 60)]
        assert all(b < a for a, b in zip(res, res[1:]))
        assert res[-1] <= 1e-8

    def test_z_zero_uses_double_series(self):
        pt = EvalPoint(0, 0.4, 2, 1.5)
        lhs = summation_formula_lhs(GENERIC, pt, -0.4, 60, TIGHT).value
        rhs = eval_phi_double_series(GENERIC, EvalPoint(0, 0.4, 2, 1.9), TIGHT).value
        assert abs(lhs - rhs) <= 1e-12

    @pytest.mark.parametrize("x", [1.5, -1.6, 1.5j])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            summation_formula_lhs(GENERIC, GENERIC_PT, x, 10)

    def test_s_equal_one_still_converges(self):
        # the shift identity holds for s = 1 too; only the r = 0 weight matters
        pt = EvalPoint(0.4, 0.3, 1, 1.5)
        lhs = summation_formula_lhs(GENERIC, pt, 0.3, 60, TIGHT).value
        rhs = eval_phi_double_series(GENERIC, EvalPoint(0.4, 0.3, 1, 1.2), TIGHT).value
        assert abs(lhs - rhs) <= 1e-10
