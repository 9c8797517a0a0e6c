"""Concrete measurement models.

Two commuting-case models (momentum-shift "standard" model, two-level
apparatus) and their noncommuting modifications with a nonzero system
Hamiltonian. The continuum apparatus of the standard model is replaced by a
periodic lattice whose momentum is defined spectrally, so translations
generated by it are exactly unitary.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .linalg import (
    InvalidOperatorError,
    commutator,
    hermitian_norm,
    kron,
    operator_norm,
    projector,
    unitary_exp,
)
from .process import DIM_S, MeasurementProcess, apparatus_fidelity

STANDARD_Q_BASIS = (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex))


@lru_cache(maxsize=16)
def _momentum_matrix(n_sites: int, length: float, hbar: float) -> np.ndarray:
    f = np.fft.fft(np.eye(n_sites), norm="ortho")
    k = 2.0 * np.pi * np.fft.fftfreq(n_sites, d=length / n_sites)
    p = f.conj().T @ (hbar * k[:, None] * f)
    p = 0.5 * (p + p.conj().T)
    p.setflags(write=False)
    return p


@dataclass(frozen=True)
class LatticeApparatus:
    """Periodic 1-d lattice of ``n_sites`` points over a period ``length``."""

    n_sites: int = 256
    length: float = 32.0
    hbar: float = 1.0

    def __post_init__(self):
        n = self.n_sites
        if n < 2 or n & (n - 1):
            raise ValueError(f"n_sites must be a power of two >= 2, got {n}")
        if self.length <= 0:
            raise ValueError("length must be positive")

    @property
    def spacing(self) -> float:
        return self.length / self.n_sites

    @property
    def position_grid(self) -> np.ndarray:
        return np.arange(self.n_sites) * self.spacing - 0.5 * self.length

    @property
    def momentum_eigenvalues(self) -> np.ndarray:
        """``hbar * 2 pi m / L`` in FFT order (``m = 0..N/2-1, -N/2..-1``)."""
        return self.hbar * 2.0 * np.pi * np.fft.fftfreq(self.n_sites, d=self.spacing)

    @cached_property
    def momentum_op(self) -> np.ndarray:
        return _momentum_matrix(self.n_sites, float(self.length), float(self.hbar))

    def translate(self, psi, shift: float) -> np.ndarray:
        """Band-limited cyclic translation ``psi(x) -> psi(x - shift)``."""
        k = 2.0 * np.pi * np.fft.fftfreq(self.n_sites, d=self.spacing)
        return np.fft.ifft(np.exp(-1j * k * shift) * np.fft.fft(psi))


@dataclass(frozen=True)
class GaussianPacket:
    """Gaussian amplitude whose position density has standard deviation ``width``."""

    center: float = 0.0
    width: float = 1.0

    def amplitudes(self, lattice: LatticeApparatus) -> np.ndarray:
        if self.width <= 0:
            raise ValueError("packet width must be positive")
        x = lattice.position_grid
        psi = np.exp(-((x - self.center) ** 2) / (4.0 * self.width**2)).astype(complex)
        return psi / np.linalg.norm(psi)


def gaussian_overlap(shift: float, width: float) -> float:
    """``|<Omega|Omega_shift>|`` for a continuum Gaussian packet."""
    return float(np.exp(-(shift**2) / (8.0 * width**2)))


def _check_shift(lattice: LatticeApparatus, tau: float) -> None:
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if tau >= 0.5 * lattice.length:
        raise ValueError(
            f"shift {tau} wraps around the lattice (period {lattice.length}); need shift < L/2"
        )


def standard_model(lattice: LatticeApparatus, packet: GaussianPacket, tau: float) -> MeasurementProcess:
    """``H = Q (x) P_A`` with trivial system and apparatus Hamiltonians.

    The q1 branch of the packet is translated by ``tau`` (the generator
    convention; this equals ``tau / hbar`` only when ``hbar = 1``).
    """
    _check_shift(lattice, tau)
    n = lattice.n_sites
    q = projector(STANDARD_Q_BASIS[1])
    return MeasurementProcess(
        dim_a=n,
        h_s=np.zeros((DIM_S, DIM_S)),
        h_a=np.zeros((n, n)),
        v=kron(q, lattice.momentum_op),
        q_basis=STANDARD_Q_BASIS,
        omega=packet.amplitudes(lattice),
        tau=tau,
        hbar=lattice.hbar,
    )


def two_level_interaction(lam: float, q_basis=STANDARD_Q_BASIS) -> np.ndarray:
    """``lambda (|q1><q1| (x) |1><1| + |q0><q0| (x) |0><0|)``."""
    e0 = np.diag([1.0, 0.0])
    e1 = np.diag([0.0, 1.0])
    return lam * (kron(projector(q_basis[1]), e1) + kron(projector(q_basis[0]), e0))


def _two_level_process(lam: float, h_s, hbar: float, q_basis) -> MeasurementProcess:
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam!r}")
    return MeasurementProcess(
        dim_a=2,
        h_s=h_s,
        h_a=np.zeros((2, 2)),
        v=two_level_interaction(lam, q_basis),
        q_basis=q_basis,
        omega=np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0),
        tau=np.pi * hbar / (2.0 * lam),
        hbar=hbar,
    )


def two_level_apparatus_model(lam: float, hbar: float = 1.0, q_basis=STANDARD_Q_BASIS) -> MeasurementProcess:
    """``H = V`` on a qubit apparatus, run for ``tau = pi hbar / (2 lambda)``."""
    return _two_level_process(lam, np.zeros((2, 2)), hbar, q_basis)


def modified_two_level_model(lam: float, h_s, hbar: float = 1.0, q_basis=STANDARD_Q_BASIS) -> MeasurementProcess:
    return _two_level_process(lam, h_s, hbar, q_basis)


def lambda_ladder(h_s, lam0: float, steps: int, factor: float = 2.0, hbar: float = 1.0) -> list[tuple[float, float]]:
    """``(lambda, F)`` along ``lam0 * factor**k`` for the modified two-level model."""
    out = []
    for k in range(steps):
        lam = lam0 * factor**k
        out.append((lam, apparatus_fidelity(modified_two_level_model(lam, h_s, hbar))))
    return out


@dataclass(frozen=True)
class EstimateCheck:
    fidelity: float
    fidelity_bound: float
    unitary_distance: float
    unitary_bound: float

    @property
    def ok(self) -> bool:
        return (
            self.fidelity <= self.fidelity_bound + 1e-9
            and self.unitary_distance <= self.unitary_bound + 1e-9
        )


def modified_standard_model(
    lattice: LatticeApparatus,
    packet: GaussianPacket,
    tau: float,
    h_s,
) -> tuple[MeasurementProcess, EstimateCheck]:
    """``H = H_S (x) 1 + Q (x) P_A`` with ``[H_S, Q] != 0``.

    Returns the process and the comparison of ``F`` against
    ``2 sqrt(2 tau ||H_S|| / hbar)`` and of ``||U(tau) - exp(-i Q (x) P_A tau / hbar)||``
    against ``tau ||H_S|| / hbar``. The fidelity estimate presumes the packet
    is sharp enough that the unmodified model is already error free.
    """
    base = standard_model(lattice, packet, tau)
    h_s = np.asarray(h_s, dtype=complex)
    if operator_norm(commutator(h_s, base.q)) <= 1e-12:
        raise InvalidOperatorError("h_s commutes with Q; the modified model needs [H_S, Q] != 0")
    proc = base.replace(h_s=h_s)
    hbar = proc.hbar
    h_norm = hermitian_norm(h_s)
    u = proc.evolution()
    u0 = unitary_exp(base.v, -tau / hbar)
    check = EstimateCheck(
        fidelity=apparatus_fidelity(proc),
        fidelity_bound=float(2.0 * np.sqrt(2.0 * tau * h_norm / hbar)),
        unitary_distance=operator_norm(u - u0),
        unitary_bound=tau * h_norm / hbar,
    )
    return proc, check


def sharp_setup(tau: float, n_sites: int = 256, width_ratio: float = 8.0) -> tuple[LatticeApparatus, GaussianPacket]:
    """Lattice and packet scaled so a shift of ``tau`` spans ``width_ratio`` widths.

    The period is ``4 tau``: the shifted packet sits a further ``tau`` away
    from the cell edge, and ``n_sites >= 64`` keeps at least two sites per width.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    width = tau / width_ratio
    return LatticeApparatus(n_sites=n_sites, length=4.0 * tau), GaussianPacket(0.0, width)


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def example_processes() -> dict[str, MeasurementProcess]:
    """The four shipped scenarios (small lattice for the momentum models)."""
    lattice = LatticeApparatus(n_sites=64, length=24.0)
    packet = GaussianPacket(0.0, 1.0)
    modified, _ = modified_standard_model(*sharp_setup(0.5, n_sites=64), 0.5, 0.1 * SIGMA_X)
    return {
        "two_level_lambda1": two_level_apparatus_model(1.0),
        "standard_model": standard_model(lattice, packet, 6.0),
        "modified_standard_model": modified,
        "modified_two_level": modified_two_level_model(10.0, SIGMA_X),
    }
