"""Beta-mixture testbed: density, threshold, assignment heterogeneity,
closed-form expected distance, and the index comparison."""

import math

import numpy as np
import pytest
from scipy import integrate

from hetlab.betamix import (
    BetaMixtureParams,
    assignment_mass,
    beta_abs_distance,
    bmm_between_rrh,
    bmm_index_comparison,
    bmm_marginal_pdf,
    expected_distance_matrix,
    optimal_threshold,
)
from hetlab.errors import ValidationError
from hetlab.special import BetaShape

from oracles import beta_abs_distance_dblquad, beta_abs_distance_quad, bmm_threshold_bisect


class TestParams:
    @pytest.mark.parametrize("t1,t2,t3", [(0.0, 1, 1), (1.0, 1, 1),
                                          (0.5, 0, 1), (0.5, 1, -2)])
    def test_invalid(self, t1, t2, t3):
        with pytest.raises(ValidationError):
            BetaMixtureParams(t1, t2, t3)


class TestMarginalPdf:
    def test_symmetry_at_half_prior(self):
        theta = BetaMixtureParams(0.5, 5.0, 20.0)
        for x in (0.1, 0.25, 0.4):
            assert bmm_marginal_pdf(x, theta) == pytest.approx(
                bmm_marginal_pdf(1.0 - x, theta), rel=1e-12)

    def test_equal_shapes_collapse(self):
        for t1 in (0.2, 0.8):
            theta = BetaMixtureParams(t1, 3.0, 3.0)
            ref = BetaMixtureParams(0.5, 3.0, 3.0)
            for x in (0.1, 0.6, 0.9):
                assert bmm_marginal_pdf(x, theta) == pytest.approx(
                    bmm_marginal_pdf(x, ref), rel=1e-12)

    def test_integrates_to_one(self):
        theta = BetaMixtureParams(0.7, 5.0, 20.0)
        val, _ = integrate.quad(lambda x: bmm_marginal_pdf(x, theta), 0.0, 1.0)
        assert val == pytest.approx(1.0, abs=1e-9)

    def test_domain(self):
        theta = BetaMixtureParams(0.5, 2.0, 2.0)
        for x in (0.0, 1.0, -0.5):
            with pytest.raises(ValidationError):
                bmm_marginal_pdf(x, theta)


class TestOptimalThreshold:
    def test_symmetric_prior_midpoint(self):
        assert optimal_threshold(BetaMixtureParams(0.5, 5.0, 20.0)) == \
            pytest.approx(0.5, abs=1e-14)
        assert optimal_threshold(BetaMixtureParams(0.5, 20.0, 5.0)) == \
            pytest.approx(0.5, abs=1e-14)

    def test_equal_shapes_branches(self):
        assert optimal_threshold(BetaMixtureParams(0.7, 5.0, 5.0)) == 0.0
        assert optimal_threshold(BetaMixtureParams(0.3, 5.0, 5.0)) == 1.0
        assert optimal_threshold(BetaMixtureParams(0.5, 5.0, 5.0)) == 1.0

    def test_against_bisection(self):
        # oracle: posterior-equality root found independently by brentq
        cases = [(0.7, 5.0, 20.0), (0.9, 2.0, 8.0), (0.2, 20.0, 5.0),
                 (0.6, 0.5, 3.0), (0.51, 4.0, 4.5)]
        for t1, t2, t3 in cases:
            ours = optimal_threshold(BetaMixtureParams(t1, t2, t3))
            assert ours == pytest.approx(bmm_threshold_bisect(t1, t2, t3),
                                         abs=1e-10)


class TestAssignmentMass:
    def test_endpoints(self):
        theta = BetaMixtureParams(0.5, 5.0, 20.0)
        assert np.allclose(assignment_mass(theta, 0.0), [0.0, 1.0])
        assert np.allclose(assignment_mass(theta, 1.0), [1.0, 0.0])

    def test_symmetric_split(self):
        theta = BetaMixtureParams(0.5, 4.0, 4.0)
        assert np.allclose(assignment_mass(theta, 0.5), [0.5, 0.5])

    def test_monotone_in_tau(self):
        theta = BetaMixtureParams(0.3, 2.0, 9.0)
        taus = np.linspace(0, 1, 41)
        mass2 = [assignment_mass(theta, t)[1] for t in taus]
        assert all(b <= a + 1e-12 for a, b in zip(mass2, mass2[1:]))

    def test_matches_quadrature(self):
        theta = BetaMixtureParams(0.7, 5.0, 20.0)
        tau = 0.37
        ref, _ = integrate.quad(lambda x: bmm_marginal_pdf(x, theta), tau, 1.0)
        assert assignment_mass(theta, tau)[1] == pytest.approx(ref, abs=1e-10)


class TestBetweenRrh:
    def test_equal_shapes_give_one(self):
        for t1 in (0.2, 0.5, 0.9):
            theta = BetaMixtureParams(t1, 6.0, 6.0)
            tau = optimal_threshold(theta)
            for q in (0.5, 1.0, 2.0, math.inf):
                assert bmm_between_rrh(theta, tau, q) == pytest.approx(1.0, rel=1e-9)

    def test_peak_of_two(self):
        theta = BetaMixtureParams(0.5, 5.0, 20.0)
        assert bmm_between_rrh(theta, optimal_threshold(theta), 1.0) == \
            pytest.approx(2.0, abs=1e-9)

    def test_range(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            theta = BetaMixtureParams(rng.uniform(0.05, 0.95),
                                      math.exp(rng.uniform(-1, 3)),
                                      math.exp(rng.uniform(-1, 3)))
            tau = rng.uniform(0, 1)
            q = rng.choice([0.5, 1.0, 2.0, 7.0])
            val = bmm_between_rrh(theta, tau, float(q))
            assert 1.0 - 1e-9 <= val <= 2.0 + 1e-9

    def test_sweep_maximized_near_optimum(self):
        theta = BetaMixtureParams(0.5, 2.0, 8.0)
        taus = np.linspace(0.01, 0.99, 99)
        for q in (1.0, 2.0, math.inf):
            vals = [bmm_between_rrh(theta, t, q) for t in taus]
            best = taus[int(np.argmax(vals))]
            assert abs(best - optimal_threshold(theta)) < 0.05

    def test_component_swap_symmetry(self):
        for t1, a, b in [(0.3, 2.0, 8.0), (0.7, 5.0, 20.0)]:
            th = BetaMixtureParams(t1, a, b)
            sw = BetaMixtureParams(1.0 - t1, b, a)
            for q in (1.0, 2.0):
                v1 = bmm_between_rrh(th, optimal_threshold(th), q)
                v2 = bmm_between_rrh(sw, optimal_threshold(sw), q)
                assert v1 == pytest.approx(v2, abs=1e-9)


class TestBetaAbsDistance:
    def test_two_uniforms(self):
        assert beta_abs_distance(BetaShape(1, 1), BetaShape(1, 1)) == \
            pytest.approx(1.0 / 3.0, abs=1e-9)

    def test_symmetric_22(self):
        ref = beta_abs_distance_quad(2, 2, 2, 2)
        assert beta_abs_distance(BetaShape(2, 2), BetaShape(2, 2)) == \
            pytest.approx(ref, abs=1e-6)

    def test_dblquad_spot_checks(self):
        # oracle: direct 2-D adaptive quadrature, also validating the
        # 1-D CDF-identity oracle used in the acceptance suite
        cases = [(2.0, 2.0, 2.0, 2.0), (5.0, 20.0, 20.0, 5.0), (0.5, 1.0, 2.0, 5.0)]
        for a1, b1, a2, b2 in cases:
            two_d = beta_abs_distance_dblquad(a1, b1, a2, b2)
            one_d = beta_abs_distance_quad(a1, b1, a2, b2)
            assert one_d == pytest.approx(two_d, abs=1e-6)
            assert beta_abs_distance(BetaShape(a1, b1), BetaShape(a2, b2)) == \
                pytest.approx(two_d, abs=1e-6)

    def test_monte_carlo(self):
        # oracle: 1e7-sample Monte Carlo for the (5,20)/(20,5) pair
        rng = np.random.default_rng(99)
        n = 10_000_000
        x = rng.beta(5.0, 20.0, size=n)
        y = rng.beta(20.0, 5.0, size=n)
        diffs = np.abs(x - y)
        mc = diffs.mean()
        se = diffs.std() / math.sqrt(n)
        closed = beta_abs_distance(BetaShape(5, 20), BetaShape(20, 5))
        assert abs(closed - mc) < 3 * se

    def test_symmetry(self):
        rng = np.random.default_rng(21)
        for _ in range(25):
            a = BetaShape(math.exp(rng.uniform(-0.7, 3)), math.exp(rng.uniform(-0.7, 3)))
            b = BetaShape(math.exp(rng.uniform(-0.7, 3)), math.exp(rng.uniform(-0.7, 3)))
            assert beta_abs_distance(a, b) == pytest.approx(
                beta_abs_distance(b, a), abs=1e-9)

    def test_range(self):
        rng = np.random.default_rng(22)
        for _ in range(50):
            a = BetaShape(math.exp(rng.uniform(-0.7, 3)), math.exp(rng.uniform(-0.7, 3)))
            b = BetaShape(math.exp(rng.uniform(-0.7, 3)), math.exp(rng.uniform(-0.7, 3)))
            d = beta_abs_distance(a, b)
            assert 0.0 <= d < 1.0


class TestIndexComparison:
    def test_equal_shapes_rrh_one(self):
        for t1 in (0.2, 0.5, 0.8):
            row = bmm_index_comparison(BetaMixtureParams(t1, 5.0, 5.0), 1.0)
            assert row.rrh == pytest.approx(1.0, rel=1e-9)

    def test_peak_row(self):
        row = bmm_index_comparison(BetaMixtureParams(0.5, 5.0, 20.0), 1.0, 1.0)
        assert row.rrh == pytest.approx(2.0, abs=1e-9)
        assert row.lci < 2.0
        assert row.neqrqe is None  # only defined at q=2

    def test_neqrqe_at_q2(self):
        row = bmm_index_comparison(BetaMixtureParams(0.5, 5.0, 20.0), 2.0, 1.0)
        assert row.neqrqe is not None and row.neqrqe >= 1.0 - 1e-9

    def test_neqrqe_absent_for_constant_distance(self):
        # equal shapes make all four expected distances identical
        row = bmm_index_comparison(BetaMixtureParams(0.5, 3.0, 3.0), 2.0, 1.0)
        assert row.neqrqe is None

    def test_fhn_paradoxical_increase(self):
        # skewing the prior away from 0.5 initially RAISES the functional
        # Hill estimate above the 2-component truth, even though the true
        # heterogeneity falls; it returns to 1 only as one component vanishes
        grid = np.arange(0.5, 0.86, 0.05)
        vals = [bmm_index_comparison(BetaMixtureParams(t1, 5.0, 20.0), 1.0).fhn
                for t1 in grid]
        assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))
        assert max(vals) > 2.0
        near_one = bmm_index_comparison(BetaMixtureParams(1 - 1e-6, 5.0, 20.0), 1.0).fhn
        assert near_one == pytest.approx(1.0, abs=1e-3)

    def test_values_at_least_one(self):
        rng = np.random.default_rng(30)
        for _ in range(30):
            theta = BetaMixtureParams(rng.uniform(0.05, 0.95), 5.0, 20.0)
            for q in (1.0, 2.0):
                row = bmm_index_comparison(theta, q, rng.uniform(0, 4))
                for v in (row.rrh, row.fhn, row.lci):
                    assert v >= 1.0 - 1e-9
                if row.neqrqe is not None:
                    assert row.neqrqe >= 1.0 - 1e-9

    def test_distance_matrix_shape(self):
        d = expected_distance_matrix(BetaMixtureParams(0.5, 5.0, 20.0))
        assert d.shape == (2, 2)
        assert d[0, 0] > 0.0  # same-component expected distance is positive
        assert d[0, 1] == d[1, 0]
        assert d[0, 1] > d[0, 0]
