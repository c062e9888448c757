"""Pooled / within / between decomposition of subsystem ensembles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetlab.core import renyi_heterogeneity
from hetlab.decomposition import (
    SubsystemEnsemble,
    decompose,
    pooled_heterogeneity,
    within_heterogeneity,
)
from hetlab.errors import ValidationError


def random_ensemble(rng, n_rows=None, n_states=None, equal_weights=True):
    n_rows = n_rows or rng.integers(1, 6)
    n_states = n_states or rng.integers(2, 8)
    table = rng.dirichlet(np.ones(n_states), size=n_rows)
    if equal_weights:
        return SubsystemEnsemble(table=table)
    w = rng.dirichlet(np.ones(n_rows))
    return SubsystemEnsemble(table=table, weights=w)


class TestValidation:
    def test_bad_row(self):
        with pytest.raises(ValidationError) as err:
            SubsystemEnsemble(table=[[0.5, 0.5], [0.5, 0.4]])
        assert "row 1" in str(err.value)

    def test_bad_weights(self):
        with pytest.raises(ValidationError):
            SubsystemEnsemble(table=[[0.5, 0.5]], weights=[0.9])
        with pytest.raises(ValidationError):
            SubsystemEnsemble(table=[[0.5, 0.5], [1.0, 0.0]], weights=[1.5, -0.5])

    def test_default_weights_uniform(self):
        ens = SubsystemEnsemble(table=[[0.5, 0.5], [1.0, 0.0]])
        assert np.allclose(ens.weights, [0.5, 0.5])
        assert ens.has_equal_weights()


class TestBranches:
    def test_identical_rows_between_one(self):
        table = np.tile([0.2, 0.3, 0.5], (4, 1))
        ens = SubsystemEnsemble(table=table)
        for q in (0.0, 0.5, 1.0, 2.0, 7.0):
            res = decompose(ens, q)
            assert res.between == pytest.approx(1.0, rel=1e-9)
            assert res.pooled == pytest.approx(
                renyi_heterogeneity(table[0], q), rel=1e-9)

    def test_disjoint_supports_between_n(self):
        # replication: N subsystems on disjoint supports, equal weights
        table = np.zeros((3, 6))
        table[0, :2] = [0.6, 0.4]
        table[1, 2:4] = [0.5, 0.5]
        table[2, 4:] = [0.9, 0.1]
        ens = SubsystemEnsemble(table=table)
        # at q=1 between is exactly N even for unequal row shapes
        assert decompose(ens, 1.0).between == pytest.approx(3.0, rel=1e-9)

    def test_q0_within_is_mean_richness(self):
        table = np.array([[0.5, 0.5, 0.0], [1.0, 0.0, 0.0], [0.2, 0.3, 0.5]])
        ens = SubsystemEnsemble(table=table)
        assert within_heterogeneity(ens, 0.0) == pytest.approx((2 + 1 + 3) / 3)

    def test_q0_within_skips_zero_weight_rows(self):
        table = np.array([[0.5, 0.5, 0.0], [1.0, 0.0, 0.0]])
        ens = SubsystemEnsemble(table=table, weights=[1.0, 0.0])
        assert within_heterogeneity(ens, 0.0) == pytest.approx(2.0)

    def test_q1_within_formula(self):
        rng = np.random.default_rng(5)
        ens = random_ensemble(rng, 3, 4, equal_weights=False)
        ents = [-(r[r > 0] * np.log(r[r > 0])).sum() for r in ens.table]
        expected = math.exp(float(np.dot(ens.weights, ents)))
        assert within_heterogeneity(ens, 1.0) == pytest.approx(expected, rel=1e-12)

    def test_q1_continuity(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            ens = random_ensemble(rng, equal_weights=False)
            at_one = within_heterogeneity(ens, 1.0)
            for eps in (1e-6, -1e-6):
                assert within_heterogeneity(ens, 1.0 + eps) == pytest.approx(
                    at_one, rel=1e-4)

    def test_inf_within_matches_large_q(self):
        rng = np.random.default_rng(13)
        ens = random_ensemble(rng, 4, 5, equal_weights=False)
        approx = within_heterogeneity(ens, math.inf)
        at_large = within_heterogeneity(ens, 1e5)
        assert approx == pytest.approx(at_large, rel=1e-3)

    def test_pooled_matches_direct(self):
        rng = np.random.default_rng(17)
        ens = random_ensemble(rng, 4, 5, equal_weights=False)
        pool = ens.weights @ ens.table
        for q in (0.0, 0.7, 1.0, 3.0, math.inf):
            assert pooled_heterogeneity(ens, q) == pytest.approx(
                renyi_heterogeneity(pool, q), rel=1e-12)


class TestIdentityAndWarnings:
    @given(st.integers(0, 10_000))
    @settings(max_examples=300, deadline=None)
    def test_pooled_equals_within_times_between(self, seed):
        rng = np.random.default_rng(seed)
        ens = random_ensemble(rng, equal_weights=bool(seed % 2))
        for q in (0.0, 0.5, 1.0, 2.0, 10.0):
            res = decompose(ens, q)
            assert res.pooled == pytest.approx(res.within * res.between, rel=1e-9)

    @given(st.integers(0, 10_000))
    @settings(max_examples=300, deadline=None)
    def test_lande_bound_equal_weights(self, seed):
        # equal weights: pooled >= within, i.e. between >= 1
        rng = np.random.default_rng(seed)
        ens = random_ensemble(rng, equal_weights=True)
        for q in (0.0, 0.5, 1.0, 2.0, 10.0):
            res = decompose(ens, q)
            assert res.between >= 1.0 - 1e-9
            assert not res.lande_warning

    def test_warning_flag(self):
        ens = SubsystemEnsemble(table=[[0.9, 0.1], [0.2, 0.8]], weights=[0.7, 0.3])
        assert decompose(ens, 2.0).lande_warning
        assert not decompose(ens, 1.0).lande_warning
        assert not decompose(ens, 0.0).lande_warning
        eq = SubsystemEnsemble(table=[[0.9, 0.1], [0.2, 0.8]])
        assert not decompose(eq, 2.0).lande_warning
