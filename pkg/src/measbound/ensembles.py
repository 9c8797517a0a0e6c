"""Random operators, states and scenarios for fuzzing the bounds."""
from __future__ import annotations

import numpy as np

from .linalg import hermitian_norm, kron
from .process import DIM_S, MeasurementProcess


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_hermitian(rng: np.random.Generator, dim: int, norm: float | None = None) -> np.ndarray:
    """``(G + G^dag)/2`` with standard complex Gaussian ``G``, optionally rescaled."""
    g = complex_gaussian(rng, (dim, dim))
    h = 0.5 * (g + g.conj().T)
    if norm is not None:
        current = hermitian_norm(h)
        h = h * (norm / current) if current > 0 else h * 0.0
    return h


def random_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = complex_gaussian(rng, dim)
    return v / np.linalg.norm(v)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(complex_gaussian(rng, (dim, dim)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Hilbert-Schmidt distributed density matrix."""
    g = complex_gaussian(rng, (dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def haar_projector(rng: np.random.Generator, dim: int, rank: int) -> np.ndarray:
    """Projector onto a Haar-random subspace of the given rank."""
    if rank == 0:
        return np.zeros((dim, dim), dtype=complex)
    q, _ = np.linalg.qr(complex_gaussian(rng, (dim, rank)))
    z = q @ q.conj().T
    return 0.5 * (z + z.conj().T)


def random_pointer(rng: np.random.Generator, dim: int) -> np.ndarray:
    return haar_projector(rng, dim, int(rng.integers(0, dim + 1)))


def random_q_basis(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    u = random_unitary(rng, DIM_S)
    return u[:, 0].copy(), u[:, 1].copy()


def random_process(
    rng: np.random.Generator,
    dim_a: int | None = None,
    tau_max: float = 10.0,
    v_norm: float | None = None,
    tau: float | None = None,
    hbar: float = 1.0,
) -> MeasurementProcess:
    """Unstructured scenario: every operator GUE-style, random Q basis and ready state.

    ``dim_a`` defaults to a uniform draw from 2..6; ``tau`` to a uniform draw
    from ``[0, tau_max]``.
    """
    if dim_a is None:
        dim_a = int(rng.integers(2, 7))
    h_s = random_hermitian(rng, DIM_S)
    h_a = random_hermitian(rng, dim_a)
    v = random_hermitian(rng, DIM_S * dim_a, norm=v_norm)
    q_basis = random_q_basis(rng)
    omega = random_state(rng, dim_a)
    if tau is None:
        tau = float(rng.uniform(0.0, tau_max))
    return MeasurementProcess(dim_a, h_s, h_a, v, q_basis, omega, tau, hbar)


def commuting_interaction(rng: np.random.Generator, h_s, dim_a: int) -> np.ndarray:
    """``V = H_S (x) B + 1 (x) C``, which commutes with ``H_S (x) 1`` exactly."""
    b = random_hermitian(rng, dim_a)
    c = random_hermitian(rng, dim_a)
    return kron(h_s, b) + kron(np.eye(DIM_S), c)


def random_commuting_process(
    rng: np.random.Generator,
    dim_a: int | None = None,
    tau_max: float = 10.0,
    hbar: float = 1.0,
) -> MeasurementProcess:
    if dim_a is None:
        dim_a = int(rng.integers(2, 7))
    h_s = random_hermitian(rng, DIM_S)
    h_a = random_hermitian(rng, dim_a)
    v = commuting_interaction(rng, h_s, dim_a)
    q_basis = random_q_basis(rng)
    omega = random_state(rng, dim_a)
    tau = float(rng.uniform(0.0, tau_max))
    return MeasurementProcess(dim_a, h_s, h_a, v, q_basis, omega, tau, hbar)
