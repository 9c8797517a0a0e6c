"""Dense complex linear algebra for system-apparatus composites.

Operators and states are plain ``numpy`` arrays. The ``as_*`` validators
return read-only complex copies so that validated values can be shared
freely between workers.

Tensor products always place the system factor first.
"""
from __future__ import annotations

import numpy as np

HERMITICITY_TOL = 1e-10
NORM_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_TOL = 1e-9


class InvalidOperatorError(ValueError):
    """An array fails the structural checks for the requested role."""


class ShapeError(InvalidOperatorError):
    """Dimensions are inconsistent."""


class EigensolverError(RuntimeError):
    """The Hermitian eigensolver did not converge."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidOperatorError("matrix has non-finite entries")
    return _frozen(m)


def as_hermitian(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"Hermitian operator must be square, got {m.shape}")
    defect = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if defect > tol:
        raise InvalidOperatorError(f"not Hermitian: max|M - M^dag| = {defect:.3e}")
    return m


def as_state(v, tol: float = NORM_TOL) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1:
        raise ShapeError(f"state vector must be 1-d, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidOperatorError("state vector has non-finite entries")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > tol:
        raise InvalidOperatorError(f"state vector norm {norm!r} differs from 1")
    return _frozen(v)


def as_density(m) -> np.ndarray:
    m = as_hermitian(m)
    tr = np.trace(m).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvalidOperatorError(f"density matrix trace {tr!r} differs from 1")
    lo = np.linalg.eigvalsh(m)[0]
    if lo < -PSD_TOL:
        raise InvalidOperatorError(f"density matrix has eigenvalue {lo:.3e} < 0")
    return m


def hermitian_eig(op) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in ascending order and the unitary matrix of eigenvectors."""
    op = np.asarray(op, dtype=complex)
    try:
        w, v = np.linalg.eigh(op)
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(op) if np.all(np.isfinite(op)) else float("nan")
        raise EigensolverError(
            f"eigh failed for {op.shape} matrix (norm={np.linalg.norm(op):.3e}, "
            f"cond={cond:.3e}): {exc}"
        ) from exc
    return w, v


def hermitian_function(op, fn) -> np.ndarray:
    w, v = hermitian_eig(op)
    return (v * fn(w)) @ v.conj().T


def unitary_exp(h, scale: float) -> np.ndarray:
    """``exp(i * scale * h)`` for Hermitian ``h``.

    Callers fold time and hbar into ``scale``; evolution over ``t`` is
    ``unitary_exp(H, -t / hbar)``.
    """
    if not np.isfinite(scale):
        raise ValueError(f"scale must be finite, got {scale!r}")
    return hermitian_function(h, lambda w: np.exp(1j * scale * w))


def _nonnegative_spectrum(w: np.ndarray, tol: float) -> np.ndarray:
    """Clip a nominally PSD spectrum.

    Negative eigenvalues down to ``-tol`` and positive ones under the
    rounding floor ``n * eps * max|w|`` are set to zero, so rank-deficient
    matrices keep exact zeros under square roots.
    """
    if not w.size:
        return w
    if w[0] < -tol:
        raise InvalidOperatorError(f"matrix is not PSD: eigenvalue {w[0]:.3e}")
    floor = w.size * np.finfo(float).eps * np.max(np.abs(w))
    return np.where(w > floor, w, 0.0)


def psd_sqrt(m, tol: float = PSD_TOL) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-tol, 0)`` are treated as rounding noise and clipped;
    anything more negative is rejected.
    """
    w, v = hermitian_eig(m)
    root = (v * np.sqrt(_nonnegative_spectrum(w, tol))) @ v.conj().T
    return 0.5 * (root + root.conj().T)


def operator_norm(m) -> float:
    """Largest singular value."""
    m = np.asarray(m, dtype=complex)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def hermitian_norm(h) -> float:
    """Operator norm of a Hermitian matrix via its spectrum."""
    w = np.linalg.eigvalsh(np.asarray(h, dtype=complex))
    return float(np.max(np.abs(w))) if w.size else 0.0


def trace_norm(h) -> float:
    return float(np.sum(np.abs(np.linalg.eigvalsh(np.asarray(h, dtype=complex)))))


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def partial_trace_system(rho, dim_s: int, dim_a: int) -> np.ndarray:
    """Trace out the (first) system factor, leaving the apparatus state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dim_s * dim_a, dim_s * dim_a):
        raise ShapeError(
            f"cannot split {rho.shape} matrix into system {dim_s} x apparatus {dim_a}"
        )
    return np.einsum("iaib->ab", rho.reshape(dim_s, dim_a, dim_s, dim_a))


def reduced_apparatus_state(psi, dim_s: int, dim_a: int) -> np.ndarray:
    """Apparatus marginal of a pure composite vector ``psi``."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (dim_s * dim_a,):
        raise ShapeError(f"vector of length {psi.size} is not {dim_s} x {dim_a}")
    amp = psi.reshape(dim_s, dim_a)
    return amp.T @ amp.conj()


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``tr sqrt(sqrt(sigma) rho sqrt(sigma))`` in [0, 1]."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ShapeError(f"fidelity of {rho.shape} and {sigma.shape} states")
    root = psd_sqrt(sigma)
    inner = root @ rho @ root
    inner = 0.5 * (inner + inner.conj().T)
    w = _nonnegative_spectrum(np.linalg.eigvalsh(inner), PSD_TOL)
    value = float(np.sum(np.sqrt(w)))
    return min(max(value, 0.0), 1.0)
