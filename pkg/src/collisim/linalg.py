"""Dense complex-matrix toolkit for small multi-qubit problems.

Conventions used throughout the package:

* qubit basis ordered (|e>, |g>), so sigma_z = diag(+1, -1);
* tensor order (probe, reservoir 1, ..., reservoir N);
* vectorization is column-stacking (``reshape(..., order="F")``), so
  vec(A X B) = (B^T kron A) vec(X);
* all matrices are complex128.

Dimensions stay at or below 2^5, so everything is dense and exact
(eigendecomposition rather than series truncation).
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import null_space

from .errors import DegenerateSteadyStateError, InvalidDensityMatrixError

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-9
EIGENVALUE_FLOOR = -1e-9


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; dimensions multiply."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def tensor(ops: list[np.ndarray]) -> np.ndarray:
    """Left-associated Kronecker product of a non-empty operator list."""
    if not ops:
        raise ValueError("tensor() needs at least one operator")
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def partial_trace(rho: np.ndarray, keep: int, dims: list[int]) -> np.ndarray:
    """Reduced matrix on subsystem ``keep`` of a state on prod(dims) dimensions.

    Trace is preserved.  Raises ValueError when prod(dims) does not match the
    matrix dimension or ``keep`` is out of range.
    """
    rho = np.asarray(rho, dtype=complex)
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ValueError(
            f"matrix dimension {rho.shape} does not match subsystem dims {dims}"
        )
    if not 0 <= keep < len(dims):
        raise ValueError(f"keep={keep} out of range for {len(dims)} subsystems")
    n = len(dims)
    reshaped = rho.reshape(dims + dims)
    # trace out every subsystem except `keep`, starting from the highest index
    # so earlier axis positions stay valid
    for idx in reversed(range(n)):
        if idx == keep:
            continue
        offset = reshaped.ndim // 2
        reshaped = np.trace(reshaped, axis1=idx, axis2=idx + offset)
    return reshaped


def assert_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> None:
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise ValueError("matrix is not Hermitian within tolerance")


def herm_unitary(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i h t) for Hermitian h, via eigendecomposition (exact, not a series)."""
    h = np.asarray(h, dtype=complex)
    assert_hermitian(h)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def check_density_matrix(
    rho: np.ndarray,
    herm_tol: float = HERMITICITY_TOL,
    trace_tol: float = TRACE_TOL,
    eig_floor: float = EIGENVALUE_FLOOR,
    context: str = "",
) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity; return rho unchanged.

    The eigenvalue floor is deliberately loose (-1e-9): long trajectories
    accumulate legitimate roundoff below tighter thresholds.
    """
    rho = np.asarray(rho, dtype=complex)
    where = f" ({context})" if context else ""
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidDensityMatrixError(f"not square{where}")
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
        raise InvalidDensityMatrixError(f"not Hermitian within {herm_tol}{where}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise InvalidDensityMatrixError(f"trace {tr} deviates from 1 beyond {trace_tol}{where}")
    eigs = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if eigs.min() < eig_floor:
        raise InvalidDensityMatrixError(
            f"eigenvalue {eigs.min()} below floor {eig_floor}{where}"
        )
    return rho


def is_density_matrix(rho: np.ndarray) -> bool:
    try:
        check_density_matrix(rho)
    except InvalidDensityMatrixError:
        return False
    return True


def vectorize(m: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(m, dtype=complex).reshape(-1, order="F")


def unvectorize(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(dim, dim, order="F")


def liouvillian_steady_state(
    liouvillian: np.ndarray, null_tol: float = 1e-10
) -> np.ndarray:
    """Unique steady state of a 4x4 single-qubit Liouvillian.

    Finds the null space (column-stacking convention), demands it be
    one-dimensional within tolerance, reshapes to 2x2, trace-normalizes and
    validates the result as a density matrix.
    """
    liouvillian = np.asarray(liouvillian, dtype=complex)
    if liouvillian.shape != (4, 4):
        raise ValueError("expected a 4x4 superoperator acting on vectorized qubit states")
    # singular values decide degeneracy; null_space uses the same machinery
    svals = np.linalg.svd(liouvillian, compute_uv=False)
    scale = max(svals[0], 1.0)
    small = np.sum(svals < null_tol * scale)
    if small != 1:
        raise DegenerateSteadyStateError(
            f"null space dimension {small} (singular values {svals})"
        )
    basis = null_space(liouvillian, rcond=null_tol)
    vec = basis[:, 0]
    rho = unvectorize(vec, 2)
    rho = (rho + rho.conj().T) / 2
    tr = np.trace(rho).real
    if abs(tr) < 1e-14:
        raise DegenerateSteadyStateError("null vector has vanishing trace")
    rho = rho / tr
    return check_density_matrix(rho, context="liouvillian steady state")
