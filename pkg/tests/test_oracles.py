import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from measbound.ensembles import random_density, random_process
from measbound.linalg import fidelity, projector
from measbound.models import two_level_apparatus_model
from measbound.oracles import (
    PvmGrid,
    fidelity_by_pvm_minimization,
    lemma2_bound_check,
    lemma2_margin,
    min_error_given_fidelity,
    overlap_sums,
)
from measbound.process import MeasurementProcess

from conftest import KET0, KET1, PLUS


class TestPvmGrid:
    def test_every_element_is_a_pvm(self):
        grid = PvmGrid(8)
        assert len(grid) == 9 * 8
        for pvm in grid:
            assert len(pvm) == 2

    def test_hemisphere(self):
        n = PvmGrid(16).directions
        assert np.all(n[:, 2] >= -1e-15)
        assert np.allclose(np.linalg.norm(n, axis=1), 1.0)

    def test_nested(self):
        coarse, fine = PvmGrid(10).directions, PvmGrid(20).directions
        d = np.min(np.linalg.norm(coarse[:, None, :] - fine[None, :, :], axis=2), axis=1)
        assert np.max(d) <= 1e-12


class TestPvmMinimization:
    def test_identical_states(self, rng):
        rho = random_density(rng, 2)
        grid = PvmGrid(16)
        assert np.allclose(overlap_sums(rho, rho, grid), 1.0, atol=1e-12)
        assert fidelity_by_pvm_minimization(rho, rho, grid)[0] == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("a, b", [(KET0, KET1), (PLUS, np.array([1, -1]) / np.sqrt(2))])
    def test_orthogonal_states(self, a, b):
        value, pvm = fidelity_by_pvm_minimization(projector(a), projector(b), PvmGrid(200))
        assert value <= 1e-3

    def test_zero_vs_plus(self):
        closed = fidelity(projector(KET0), projector(PLUS))
        value, _ = fidelity_by_pvm_minimization(projector(KET0), projector(PLUS), PvmGrid(400))
        assert abs(value - closed) <= 2e-3
        assert abs(value - 1 / np.sqrt(2)) <= 2e-3

    def test_argmin_realizes_value(self, rng):
        rho, sigma = random_density(rng, 2), random_density(rng, 2)
        value, pvm = fidelity_by_pvm_minimization(rho, sigma, PvmGrid(32))
        direct = sum(np.sqrt(np.trace(rho @ e).real * np.trace(sigma @ e).real) for e in pvm.projectors)
        assert direct == pytest.approx(value, abs=1e-12)

    def test_scope(self):
        with pytest.raises(ValueError):
            fidelity_by_pvm_minimization(np.eye(3) / 3, np.eye(3) / 3, PvmGrid(8))
        with pytest.raises(ValueError):
            fidelity_by_pvm_minimization(np.eye(2) / 2, np.eye(2) / 2, PvmGrid(4))

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_refinement_is_monotone_and_bounded_below(self, seed):
        rng = np.random.default_rng(seed)
        rho, sigma = random_density(rng, 2), random_density(rng, 2)
        f = fidelity(rho, sigma)
        values = [fidelity_by_pvm_minimization(rho, sigma, PvmGrid(r))[0] for r in (8, 16, 32, 64)]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
        assert values[-1] >= f - 1e-9


class TestLemma2:
    def test_indistinguishable_states_saturate_at_half(self):
        p = MeasurementProcess(2, np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((4, 4)), (KET0, KET1), PLUS, 1.0)
        assert lemma2_bound_check(p, 50, seed=1) >= -1e-9
        # Z = 0 or Z = 1 gives P_error = 1/2, where the bound equals F = 1.
        assert lemma2_margin(1.0, 0.5) == 0.0

    def test_error_free(self):
        p = two_level_apparatus_model(1.0)
        assert lemma2_bound_check(p, 50, seed=0) >= -1e-9

    def test_random_scenario(self, rng):
        p = random_process(rng, dim_a=4)
        assert lemma2_bound_check(p, 100, seed=5) >= -1e-9

    def test_needs_samples(self, rng):
        with pytest.raises(ValueError):
            lemma2_bound_check(random_process(rng), 0, seed=0)


def test_min_error_given_fidelity_matches_scan():
    p = np.linspace(0.0, 0.5, 500001)
    for f in (0.0, 0.1, 0.5, 0.8, 0.99, 1.0):
        feasible = p[f <= 2 * np.sqrt(p - p * p) + 1e-15]
        assert min_error_given_fidelity(f) == pytest.approx(feasible.min(), abs=2e-6)
