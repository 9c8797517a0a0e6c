"""Brute-force ground truth for the fidelity lemmas.

``fidelity_by_pvm_minimization`` scans two-outcome rank-1 PVMs on the
Bloch sphere and never touches a matrix square root, so it is independent
of :func:`measbound.linalg.fidelity`. For qubit states, splitting a
projector further cannot lower the overlap sum below the rank-1 optimum
(coarse-graining), so two-element PVMs suffice; higher-rank apparatus
states are out of reach of this oracle.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .ensembles import random_pointer
from .linalg import fidelity
from .process import MeasurementProcess, Pvm, apparatus_states, statistics_from_states

_PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
)


@dataclass(frozen=True)
class PvmGrid:
    """Bloch directions on the closed upper hemisphere.

    ``theta_k = (pi/2) k / resolution`` for ``k = 0..resolution`` and
    ``phi_m = 2 pi m / resolution`` for ``m = 0..resolution-1``. The grid at
    ``2 * resolution`` contains the grid at ``resolution``. Antipodal
    directions give the same unordered PVM, hence the hemisphere.
    """

    resolution: int

    def __post_init__(self):
        if self.resolution < 1:
            raise ValueError("resolution must be positive")

    @cached_property
    def directions(self) -> np.ndarray:
        theta = 0.5 * np.pi * np.arange(self.resolution + 1) / self.resolution
        phi = 2.0 * np.pi * np.arange(self.resolution) / self.resolution
        t, f = np.meshgrid(theta, phi, indexing="ij")
        n = np.stack([np.sin(t) * np.cos(f), np.sin(t) * np.sin(f), np.cos(t)], axis=-1)
        return n.reshape(-1, 3)

    @cached_property
    def projectors(self) -> np.ndarray:
        """Array of shape ``(M, 2, 2, 2)``: ``[k, 0]`` is ``(1 + n.sigma)/2``."""
        ns = np.einsum("mk,kab->mab", self.directions, _PAULI)
        eye = np.eye(2)
        return 0.5 * np.stack([eye + ns, eye - ns], axis=1)

    def __len__(self):
        return self.directions.shape[0]

    def pvm(self, index: int) -> Pvm:
        e = self.projectors[index]
        return Pvm((e[0], e[1]))

    def __iter__(self):
        return (self.pvm(k) for k in range(len(self)))


def overlap_sums(rho, sigma, grid: PvmGrid) -> np.ndarray:
    """``sum_i sqrt(tr(rho E_i)) sqrt(tr(sigma E_i))`` for every grid PVM."""
    e = grid.projectors
    pr = np.clip(np.einsum("ab,miba->mi", rho, e).real, 0.0, None)
    ps = np.clip(np.einsum("ab,miba->mi", sigma, e).real, 0.0, None)
    return np.sum(np.sqrt(pr * ps), axis=1)


def fidelity_by_pvm_minimization(rho, sigma, grid: PvmGrid) -> tuple[float, Pvm]:
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != (2, 2) or sigma.shape != (2, 2):
        raise ValueError("PVM-minimization oracle only supports qubit states")
    if grid.resolution < 8:
        raise ValueError("grid resolution must be at least 8")
    sums = overlap_sums(rho, sigma, grid)
    k = int(np.argmin(sums))  # first minimum: lowest grid index wins ties
    return float(sums[k]), grid.pvm(k)


def lemma2_margin(f: float, p_error: float) -> float:
    return 2.0 * np.sqrt(max(p_error - p_error**2, 0.0)) - f


def lemma2_bound_check(p: MeasurementProcess, z_samples: int, seed: int) -> float:
    """Worst ``2 sqrt(P_err - P_err^2) - F`` over Haar-random pointer projectors.

    Each sample draws a rank uniformly from ``0..dim_a`` and then a
    Haar-random subspace of that rank.
    """
    if z_samples < 1:
        raise ValueError("z_samples must be >= 1")
    rng = np.random.default_rng(seed)
    rho0, rho1 = apparatus_states(p)
    f = fidelity(rho0, rho1)
    worst = np.inf
    for _ in range(z_samples):
        z = random_pointer(rng, p.dim_a)
        stats = statistics_from_states(rho0, rho1, z)
        worst = min(worst, lemma2_margin(f, stats.p_error))
    return float(worst)


def min_error_given_fidelity(f: float) -> float:
    """Smallest ``P_err`` in ``[0, 1/2]`` compatible with ``F <= 2 sqrt(P_err - P_err^2)``."""
    f = min(max(f, 0.0), 1.0)
    return 0.5 * (1.0 - np.sqrt(1.0 - f * f))
