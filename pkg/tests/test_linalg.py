import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from measbound.ensembles import random_density, random_hermitian
from measbound.linalg import (
    InvalidOperatorError,
    ShapeError,
    as_density,
    as_hermitian,
    as_state,
    commutator,
    fidelity,
    hermitian_eig,
    kron,
    operator_norm,
    partial_trace_system,
    projector,
    psd_sqrt,
    unitary_exp,
)

from conftest import KET0, KET1, PLUS, SX, SZ

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=1, max_value=16)


def quadratic_roots(m):
    """Eigenvalues of a 2x2 matrix from its characteristic polynomial."""
    tr = np.trace(m).real
    det = np.linalg.det(m).real
    disc = np.sqrt(tr * tr - 4 * det)
    return np.array([(tr - disc) / 2, (tr + disc) / 2])


class TestHermitianEig:
    def test_diagonal(self):
        w, v = hermitian_eig(np.diag([3.0, 1.0]))
        assert np.allclose(w, [1, 3])

    def test_pauli_x_matches_characteristic_polynomial(self):
        w, _ = hermitian_eig(SX)
        assert np.allclose(w, quadratic_roots(SX), atol=1e-12)
        assert np.allclose(w, [-1, 1])

    def test_zero(self):
        w, _ = hermitian_eig(np.zeros((4, 4)))
        assert np.array_equal(w, np.zeros(4))

    @given(seed=seeds, dim=dims)
    def test_reconstruction(self, seed, dim):
        h = random_hermitian(np.random.default_rng(seed), dim)
        w, v = hermitian_eig(h)
        assert np.all(np.diff(w) >= 0)
        assert np.max(np.abs((v * w) @ v.conj().T - h)) <= 1e-9
        assert np.max(np.abs(v.conj().T @ v - np.eye(dim))) <= 1e-9


class TestUnitaryExp:
    def test_diagonal(self):
        u = unitary_exp(np.diag([1.0, -1.0]), -np.pi / 2)
        assert np.allclose(u, np.diag([np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)]), atol=1e-12)
        assert np.allclose(u, np.diag([-1j, 1j]), atol=1e-12)

    def test_zero_scale_is_identity(self, rng):
        h = random_hermitian(rng, 5)
        assert np.allclose(unitary_exp(h, 0.0), np.eye(5), atol=1e-12)

    def test_pauli_x_half_turn(self):
        # exp(-i a sx) = cos(a) 1 - i sin(a) sx
        a = np.pi
        closed = np.cos(a) * np.eye(2) - 1j * np.sin(a) * SX
        u = unitary_exp(SX, -np.pi)
        assert np.allclose(u, closed, atol=1e-12)
        assert np.allclose(u, -np.eye(2), atol=1e-12)

    def test_rejects_nonfinite_scale(self):
        with pytest.raises(ValueError):
            unitary_exp(SX, np.inf)

    @given(seed=seeds, dim=dims, scale=st.floats(-20, 20))
    def test_unitary(self, seed, dim, scale):
        u = unitary_exp(random_hermitian(np.random.default_rng(seed), dim), scale)
        assert operator_norm(u.conj().T @ u - np.eye(dim)) <= 1e-9

    @given(seed=seeds, dim=dims, s1=st.floats(-5, 5), s2=st.floats(-5, 5))
    def test_group_law(self, seed, dim, s1, s2):
        h = random_hermitian(np.random.default_rng(seed), dim)
        lhs = unitary_exp(h, s1) @ unitary_exp(h, s2)
        assert np.max(np.abs(lhs - unitary_exp(h, s1 + s2))) <= 1e-8


class TestPsdSqrt:
    def test_diagonal(self):
        r = psd_sqrt(np.diag([0.25, 0.75]))
        assert np.allclose(r, np.diag([0.5, np.sqrt(0.75)]), atol=1e-12)

    def test_pure_state_is_idempotent(self):
        p = projector(KET0)
        assert np.allclose(psd_sqrt(p), p, atol=1e-12)

    def test_maximally_mixed(self):
        assert np.allclose(psd_sqrt(np.eye(2) / 2), np.eye(2) / np.sqrt(2), atol=1e-12)

    def test_clips_rounding_noise_and_rejects_negative(self):
        psd_sqrt(np.diag([1.0, -5e-10]))
        with pytest.raises(InvalidOperatorError):
            psd_sqrt(np.diag([1.0, -1e-6]))

    @given(seed=seeds, dim=st.integers(1, 8))
    def test_square_reconstructs(self, seed, dim):
        rho = random_density(np.random.default_rng(seed), dim)
        r = psd_sqrt(rho)
        assert np.max(np.abs(r @ r - rho)) <= 1e-8


class TestOperatorNorm:
    def test_examples(self):
        assert operator_norm(SX) == pytest.approx(1.0)
        assert operator_norm(np.diag([2.0, -5.0])) == pytest.approx(5.0)

    def test_commutator_with_projector(self):
        c = commutator(projector(KET0), SX)
        assert np.allclose(c, [[0, 1], [-1, 0]])
        oracle = np.sqrt(np.max(quadratic_roots(c.conj().T @ c)))
        assert operator_norm(c) == pytest.approx(oracle, abs=1e-12)
        assert operator_norm(c) == pytest.approx(1.0, abs=1e-12)

    @given(seed=seeds, dim=st.integers(1, 8))
    def test_submultiplicative(self, seed, dim):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        b = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        assert operator_norm(a @ b) <= operator_norm(a) * operator_norm(b) + 1e-9

    @given(seed=seeds, dim=dims)
    def test_hermitian_norm_is_spectral_radius(self, seed, dim):
        h = random_hermitian(np.random.default_rng(seed), dim)
        assert operator_norm(h) == pytest.approx(np.max(np.abs(np.linalg.eigvalsh(h))), rel=1e-10)


class TestKron:
    def test_identities(self):
        assert np.array_equal(kron(np.eye(2), np.eye(3)), np.eye(6))

    def test_system_factor_first(self):
        assert np.array_equal(kron(np.diag([1, 0]), np.diag([2, 3])), np.diag([2, 3, 0, 0]))

    def test_pauli_square(self):
        xx = kron(SX, SX)
        assert np.array_equal(xx @ xx, np.eye(4))


class TestPartialTrace:
    def test_product_state(self, rng):
        rs, ra = random_density(rng, 2), random_density(rng, 3)
        assert np.max(np.abs(partial_trace_system(kron(rs, ra), 2, 3) - ra)) <= 1e-10

    def test_bell_state_against_index_contraction(self):
        bell = (kron(KET0[:, None], KET0[:, None]) + kron(KET1[:, None], KET1[:, None]))[:, 0] / np.sqrt(2)
        rho = projector(bell)
        oracle = np.zeros((2, 2), dtype=complex)
        for a in range(2):
            for b in range(2):
                for i in range(2):
                    oracle[a, b] += rho[2 * i + a, 2 * i + b]
        out = partial_trace_system(rho, 2, 2)
        assert np.allclose(out, oracle, atol=1e-15)
        assert np.allclose(out, np.eye(2) / 2, atol=1e-15)

    def test_trace_preserved(self, rng):
        rho = random_density(rng, 6)
        assert np.trace(partial_trace_system(rho, 2, 3)).real == pytest.approx(1.0, abs=1e-10)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            partial_trace_system(np.eye(6) / 6, 2, 2)

    @given(seed=seeds, da=st.integers(1, 6))
    def test_product_property(self, seed, da):
        rng = np.random.default_rng(seed)
        rs, ra = random_density(rng, 2), random_density(rng, da)
        assert np.max(np.abs(partial_trace_system(kron(rs, ra), 2, da) - ra)) <= 1e-10


class TestFidelity:
    def test_self(self, rng):
        rho = random_density(rng, 4)
        assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-9)

    def test_pure_states_match_overlap(self):
        oracle = abs(np.vdot(KET0, PLUS))
        assert fidelity(projector(KET0), projector(PLUS)) == pytest.approx(oracle, abs=1e-12)
        assert oracle == pytest.approx(1 / np.sqrt(2))

    def test_orthogonal(self):
        assert fidelity(projector(KET0), projector(KET1)) == pytest.approx(0.0, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            fidelity(np.eye(2) / 2, np.eye(3) / 3)

    @given(seed=seeds, dim=st.integers(1, 6))
    def test_symmetric_and_bounded(self, seed, dim):
        rng = np.random.default_rng(seed)
        rho, sigma = random_density(rng, dim), random_density(rng, dim)
        f = fidelity(rho, sigma)
        assert 0.0 <= f <= 1.0
        assert abs(f - fidelity(sigma, rho)) <= 1e-9

    @settings(max_examples=50)
    @given(seed=seeds, dim=st.integers(2, 6))
    def test_pure_states_random(self, seed, dim):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        b = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
        assert fidelity(projector(a), projector(b)) == pytest.approx(abs(np.vdot(a, b)), abs=1e-9)


class TestValidators:
    def test_hermitian(self):
        with pytest.raises(InvalidOperatorError):
            as_hermitian([[0, 1], [0, 0]])
        with pytest.raises(ShapeError):
            as_hermitian(np.zeros((2, 3)))
        with pytest.raises(InvalidOperatorError):
            as_hermitian([[np.nan, 0], [0, 0]])

    def test_read_only(self):
        m = as_hermitian(SZ)
        with pytest.raises(ValueError):
            m[0, 0] = 2

    def test_state_norm(self):
        with pytest.raises(InvalidOperatorError):
            as_state([1.0, 1.0])
        as_state(PLUS)

    def test_density(self):
        as_density(np.eye(2) / 2)
        with pytest.raises(InvalidOperatorError):
            as_density(np.eye(2))
        with pytest.raises(InvalidOperatorError):
            as_density(np.diag([1.5, -0.5]))
