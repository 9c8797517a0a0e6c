"""Measurement processes on a two-level system and the trade-off bound terms.

A :class:`MeasurementProcess` fixes the system Hamiltonian, apparatus
Hamiltonian, interaction, the eigenbasis of the measured projector ``Q``,
the apparatus ready state and the duration. Everything else (apparatus
output states, pointer statistics, bound terms) is a pure function of it.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import cached_property

import numpy as np

from .linalg import (
    InvalidOperatorError,
    ShapeError,
    as_hermitian,
    as_state,
    commutator,
    fidelity,
    hermitian_eig,
    hermitian_norm,
    kron,
    operator_norm,
    projector,
    reduced_apparatus_state,
)

DIM_S = 2
PROJECTOR_TOL = 1e-9
SLACK_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MeasurementProcess:
    dim_a: int
    h_s: np.ndarray
    h_a: np.ndarray
    v: np.ndarray
    q_basis: tuple[np.ndarray, np.ndarray]
    omega: np.ndarray
    tau: float
    hbar: float = 1.0

    def __post_init__(self):
        dim_a = int(self.dim_a)
        if dim_a < 1:
            raise ShapeError(f"dim_a must be positive, got {self.dim_a}")
        h_s = as_hermitian(self.h_s)
        h_a = as_hermitian(self.h_a)
        v = as_hermitian(self.v)
        if h_s.shape != (DIM_S, DIM_S):
            raise ShapeError(f"h_s must be 2x2, got {h_s.shape}")
        if h_a.shape != (dim_a, dim_a):
            raise ShapeError(f"h_a must be {dim_a}x{dim_a}, got {h_a.shape}")
        n = DIM_S * dim_a
        if v.shape != (n, n):
            raise ShapeError(f"v must be {n}x{n}, got {v.shape}")
        if len(self.q_basis) != 2:
            raise ShapeError("q_basis must hold exactly two vectors")
        q0, q1 = (as_state(q) for q in self.q_basis)
        if q0.shape != (DIM_S,) or q1.shape != (DIM_S,):
            raise ShapeError("q_basis vectors must have length 2")
        overlap = abs(np.vdot(q0, q1))
        if overlap > 1e-10:
            raise InvalidOperatorError(f"q_basis not orthogonal: |<q0|q1>| = {overlap:.3e}")
        omega = as_state(self.omega)
        if omega.shape != (dim_a,):
            raise ShapeError(f"omega must have length {dim_a}, got {omega.shape}")
        tau = float(self.tau)
        hbar = float(self.hbar)
        if not np.isfinite(tau) or tau < 0:
            raise ValueError(f"tau must be finite and >= 0, got {self.tau!r}")
        if not np.isfinite(hbar) or hbar <= 0:
            raise ValueError(f"hbar must be finite and > 0, got {self.hbar!r}")
        for name, value in [
            ("dim_a", dim_a), ("h_s", h_s), ("h_a", h_a), ("v", v),
            ("q_basis", (q0, q1)), ("omega", omega), ("tau", tau), ("hbar", hbar),
        ]:
            object.__setattr__(self, name, value)

    @property
    def dim(self) -> int:
        return DIM_S * self.dim_a

    @property
    def q(self) -> np.ndarray:
        """The measured projector ``|q1><q1|``."""
        return projector(self.q_basis[1])

    @property
    def h_s_ext(self) -> np.ndarray:
        return kron(self.h_s, np.eye(self.dim_a))

    def replace(self, **changes) -> MeasurementProcess:
        fields = dict(
            dim_a=self.dim_a, h_s=self.h_s, h_a=self.h_a, v=self.v,
            q_basis=self.q_basis, omega=self.omega, tau=self.tau, hbar=self.hbar,
        )
        fields.update(changes)
        return MeasurementProcess(**fields)

    @cached_property
    def _spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        return hermitian_eig(total_hamiltonian(self))

    def evolution(self, t: float | None = None) -> np.ndarray:
        """``U(t) = exp(-i H t / hbar)``; ``t`` defaults to ``tau``."""
        t = self.tau if t is None else t
        w, vecs = self._spectrum
        return (vecs * np.exp(-1j * w * (t / self.hbar))) @ vecs.conj().T

    def initial_vector(self, j: int) -> np.ndarray:
        return kron(self.q_basis[j][:, None], self.omega[:, None])[:, 0]

    def isometry(self) -> np.ndarray:
        """``W: |psi> -> U(tau)(|psi> (x) |Omega>)`` as a ``dim x 2`` matrix."""
        embed = kron(np.eye(DIM_S), self.omega[:, None])
        return self.evolution() @ embed


@dataclass(frozen=True, eq=False)
class Pvm:
    projectors: tuple[np.ndarray, ...]

    def __post_init__(self):
        ps = tuple(as_hermitian(p, tol=PROJECTOR_TOL) for p in self.projectors)
        if not ps:
            raise InvalidOperatorError("a PVM needs at least one projector")
        d = ps[0].shape[0]
        if any(p.shape != (d, d) for p in ps):
            raise ShapeError("PVM projectors have inconsistent shapes")
        for k, p in enumerate(ps):
            err = np.max(np.abs(p @ p - p))
            if err > PROJECTOR_TOL:
                raise InvalidOperatorError(f"PVM element {k} not idempotent ({err:.3e})")
        for a in range(len(ps)):
            for b in range(a + 1, len(ps)):
                err = np.max(np.abs(ps[a] @ ps[b]))
                if err > PROJECTOR_TOL:
                    raise InvalidOperatorError(f"PVM elements {a},{b} not orthogonal ({err:.3e})")
        err = np.max(np.abs(sum(ps) - np.eye(d)))
        if err > PROJECTOR_TOL:
            raise InvalidOperatorError(f"PVM does not sum to identity ({err:.3e})")
        object.__setattr__(self, "projectors", ps)

    @classmethod
    def binary(cls, z) -> Pvm:
        """``{1 - Z, Z}``: outcome 0 then outcome 1."""
        z = np.asarray(z, dtype=complex)
        return cls((np.eye(z.shape[0]) - z, z))

    def __len__(self):
        return len(self.projectors)

    def __getitem__(self, k):
        return self.projectors[k]


@dataclass(frozen=True)
class PointerOutcome:
    p_1_given_0: float
    p_0_given_0: float
    p_1_given_1: float
    p_0_given_1: float
    p_error: float


@dataclass(frozen=True)
class BoundReport:
    lhs: float
    fidelity_term: float
    drive_term: float
    slack: float
    fidelity: float
    p_error: float
    corollary1_rhs: float
    corollary1_slack: float
    corollary2_lhs: float
    corollary2_rhs: float
    h_s_norm: float
    drive_commutator_norm: float

    def to_dict(self) -> dict:
        return asdict(self)


def total_hamiltonian(p: MeasurementProcess) -> np.ndarray:
    return kron(p.h_s, np.eye(p.dim_a)) + kron(np.eye(DIM_S), p.h_a) + p.v


def apparatus_states(p: MeasurementProcess) -> tuple[np.ndarray, np.ndarray]:
    """Apparatus marginals of ``U(tau)|q_j, Omega>`` for ``j = 0, 1``."""
    u = p.evolution()
    out = []
    for j in (0, 1):
        psi = u @ p.initial_vector(j)
        rho = reduced_apparatus_state(psi, DIM_S, p.dim_a)
        out.append(0.5 * (rho + rho.conj().T))
    return out[0], out[1]


def apparatus_fidelity(p: MeasurementProcess) -> float:
    rho0, rho1 = apparatus_states(p)
    return fidelity(rho0, rho1)


def _check_projector(z, dim: int) -> np.ndarray:
    z = as_hermitian(z, tol=PROJECTOR_TOL)
    if z.shape != (dim, dim):
        raise ShapeError(f"pointer must be {dim}x{dim}, got {z.shape}")
    err = np.max(np.abs(z @ z - z)) if z.size else 0.0
    if err > PROJECTOR_TOL:
        raise InvalidOperatorError(f"pointer is not a projector: max|Z^2 - Z| = {err:.3e}")
    return z


def _clip01(x: float) -> float:
    return min(max(float(x), 0.0), 1.0)


def statistics_from_states(rho0, rho1, z) -> PointerOutcome:
    p10 = _clip01(np.trace(rho0 @ z).real)
    p11 = _clip01(np.trace(rho1 @ z).real)
    p00 = 1.0 - p10
    p01 = 1.0 - p11
    return PointerOutcome(p10, p00, p11, p01, 0.5 * (p10 + p01))


def pointer_statistics(p: MeasurementProcess, z) -> PointerOutcome:
    z = _check_projector(z, p.dim_a)
    rho0, rho1 = apparatus_states(p)
    return statistics_from_states(rho0, rho1, z)


def optimal_pointer(rho0, rho1) -> tuple[np.ndarray, float]:
    """Helstrom pointer: projector onto the positive part of ``rho1 - rho0``."""
    rho0 = np.asarray(rho0, dtype=complex)
    rho1 = np.asarray(rho1, dtype=complex)
    if rho0.shape != rho1.shape:
        raise ShapeError(f"states have shapes {rho0.shape} and {rho1.shape}")
    w, vecs = hermitian_eig(rho1 - rho0)
    pos = vecs[:, w > 0]
    z = pos @ pos.conj().T
    p_error = 0.5 * (1.0 - 0.5 * float(np.sum(np.abs(w))))
    return z, min(max(p_error, 0.0), 0.5)


def bound_report(p: MeasurementProcess) -> BoundReport:
    rho0, rho1 = apparatus_states(p)
    f = fidelity(rho0, rho1)
    _, p_err = optimal_pointer(rho0, rho1)
    h_norm = hermitian_norm(p.h_s)
    lhs = operator_norm(commutator(p.q, p.h_s))
    drive_norm = operator_norm(commutator(p.v, p.h_s_ext))
    fidelity_term = h_norm * f
    drive_term = p.tau / p.hbar * drive_norm
    cor1 = 2.0 * h_norm * np.sqrt(max(p_err - p_err**2, 0.0)) + drive_term
    return BoundReport(
        lhs=lhs,
        fidelity_term=fidelity_term,
        drive_term=drive_term,
        slack=fidelity_term + drive_term - lhs,
        fidelity=f,
        p_error=p_err,
        corollary1_rhs=float(cor1),
        corollary1_slack=float(cor1 - lhs),
        corollary2_lhs=p.tau * drive_norm,
        corollary2_rhs=p.hbar * lhs,
        h_s_norm=h_norm,
        drive_commutator_norm=drive_norm,
    )


def commutator_identity_check(h_s, q_basis) -> tuple[float, float]:
    """``(||[Q, H_S]||, |<q0|H_S|q1>|)``; the two agree for any 2x2 Hermitian."""
    h_s = as_hermitian(h_s)
    q0, q1 = (as_state(q) for q in q_basis)
    q = projector(q1)
    return operator_norm(commutator(q, h_s)), float(abs(np.vdot(q0, h_s @ q1)))


def heisenberg_drift_check(p: MeasurementProcess) -> tuple[float, float]:
    """Actual drift of ``H_S (x) 1`` under ``U(tau)`` and its linear-in-time bound."""
    hs = p.h_s_ext
    u = p.evolution()
    actual = operator_norm(hs - u.conj().T @ hs @ u)
    bound = p.tau / p.hbar * operator_norm(commutator(hs, p.v))
    return actual, bound


@dataclass(frozen=True, eq=False)
class JointPovm:
    y: dict[tuple[int, int], np.ndarray]
    energy_projectors: tuple[np.ndarray, np.ndarray]
    energy_defects: tuple[float, float]
    q_defects: tuple[float, float]

    @property
    def marginal_defects(self) -> tuple[float, float, float, float]:
        return self.energy_defects + self.q_defects


def joint_povm(p: MeasurementProcess, pointer: Pvm, degeneracy_tol: float = 1e-10) -> JointPovm:
    """``Y_nj = W^dag (|e_n><e_n| (x) M_j) W`` and the defects of its two marginals."""
    if len(pointer) != 2:
        raise InvalidOperatorError(f"pointer PVM must have 2 elements, got {len(pointer)}")
    if pointer[0].shape != (p.dim_a, p.dim_a):
        raise ShapeError(f"pointer acts on dim {pointer[0].shape[0]}, apparatus has {p.dim_a}")
    w, vecs = hermitian_eig(p.h_s)
    if abs(w[1] - w[0]) <= degeneracy_tol * max(1.0, abs(w).max()):
        raise InvalidOperatorError("h_s is degenerate; energy projectors are ill-defined")
    e = tuple(projector(vecs[:, n]) for n in (0, 1))
    iso = p.isometry()
    y = {}
    for n in (0, 1):
        for j in (0, 1):
            block = iso.conj().T @ kron(e[n], pointer[j]) @ iso
            y[n, j] = 0.5 * (block + block.conj().T)
    qp = tuple(projector(q) for q in p.q_basis)
    energy = tuple(operator_norm(y[n, 0] + y[n, 1] - e[n]) for n in (0, 1))
    qdef = tuple(operator_norm(y[0, j] + y[1, j] - qp[j]) for j in (0, 1))
    return JointPovm(y=y, energy_projectors=e, energy_defects=energy, q_defects=qdef)


def correlation_function(p: MeasurementProcess, times) -> tuple[np.ndarray, float]:
    """Sample ``<q0,Omega| U(t)^dag [H_S (x) 1, V] U(t) |q1,Omega>``.

    Also returns ``(1/hbar) * integral |C(t)| dt`` by the trapezoidal rule on
    the given (sorted) grid.
    """
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("times must be nonnegative")
    k = commutator(p.h_s_ext, p.v)
    w, vecs = p._spectrum
    c0 = vecs.conj().T @ p.initial_vector(0)
    c1 = vecs.conj().T @ p.initial_vector(1)
    phase = np.exp(-1j * np.outer(times, w) / p.hbar)
    psi0 = (phase * c0) @ vecs.T
    psi1 = (phase * c1) @ vecs.T
    values = np.einsum("ti,ij,tj->t", psi0.conj(), k, psi1)
    integral = float(np.trapezoid(np.abs(values), times)) / p.hbar if times.size > 1 else 0.0
    return values, integral


def drift_matrix_element(p: MeasurementProcess) -> float:
    """``|<q0,Omega| H_S (x) 1 - U^dag (H_S (x) 1) U |q1,Omega>|``."""
    hs = p.h_s_ext
    u = p.evolution()
    return float(abs(np.vdot(p.initial_vector(0), (hs - u.conj().T @ hs @ u) @ p.initial_vector(1))))
