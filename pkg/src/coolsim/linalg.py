"""Dense complex linear algebra for multi-qubit density matrices.

Matrices are plain ``numpy`` arrays in row-major order. Qubit ordering is
big-endian throughout the package: qubit 0 is the most significant bit of
the computational-basis index, so ``|q0 q1 ... q_{n-1}>`` maps to the index
``q0*2^{n-1} + ... + q_{n-1}``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidDims, InvalidInput, InvalidState, InvalidUnitary

# Default tolerances; tests may pass tighter or looser values explicitly.
HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-10
UNITARY_ATOL = 1e-10

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two matrices."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def kron_all(factors: Iterable[np.ndarray]) -> np.ndarray:
    """Kronecker product of a sequence of matrices, left to right."""
    out = np.eye(1, dtype=complex)
    for f in factors:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def num_qubits(dim: int) -> int:
    """Number of qubits for a Hilbert-space dimension, or raise InvalidDims."""
    n = int(dim).bit_length() - 1
    if dim <= 0 or 2**n != dim:
        raise InvalidDims(f"dimension {dim} is not a power of two")
    return n


def check_density_matrix(
    rho: np.ndarray,
    herm_atol: float = HERMITIAN_ATOL,
    trace_atol: float = TRACE_ATOL,
    psd_atol: float = PSD_ATOL,
) -> None:
    """Validate Hermiticity, unit trace and positivity; raise InvalidState."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidState(f"density matrix must be square, got shape {rho.shape}")
    herm_defect = np.abs(rho - rho.conj().T).max()
    if herm_defect > herm_atol:
        raise InvalidState(f"not Hermitian: max |rho - rho^dag| = {herm_defect:.3e}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_atol:
        raise InvalidState(f"trace {tr} differs from 1 beyond {trace_atol}")
    evals = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if evals.min() < -psd_atol:
        raise InvalidState(f"negative eigenvalue {evals.min():.3e} beyond {psd_atol}")


def partial_trace(
    rho: np.ndarray, keep: Sequence[int], dims: Sequence[int]
) -> np.ndarray:
    """Trace out all subsystems not listed in ``keep``.

    ``dims`` lists every subsystem dimension in order; their product must
    equal the matrix dimension. Kept subsystems stay in their original order.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = list(dims)
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise InvalidDims(
            f"subsystem dims {dims} do not match matrix shape {rho.shape}"
        )
    keep = sorted(set(keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise InvalidDims(f"keep indices {keep} out of range for {len(dims)} subsystems")
    traced = [i for i in range(len(dims)) if i not in keep]
    tensor = rho.reshape(dims + dims)
    for offset, i in enumerate(traced):
        ax = i - offset  # earlier traces shrink the index list
        tensor = np.trace(tensor, axis1=ax, axis2=ax + len(dims) - offset)
    kept_dim = int(np.prod([dims[i] for i in keep])) if keep else 1
    return tensor.reshape(kept_dim, kept_dim)


def hermitian_eig(a: np.ndarray, atol: float = HERMITIAN_ATOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns eigenvalues in ascending order and the matrix of eigenvectors
    (columns), so that ``a = V diag(w) V^dag``.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {a.shape}")
    defect = np.abs(a - a.conj().T).max()
    if defect > atol:
        raise InvalidInput(f"not Hermitian: max |a - a^dag| = {defect:.3e}")
    w, v = np.linalg.eigh(a)
    return w, v


def fidelity(rho: np.ndarray, sigma: np.ndarray, psd_atol: float = PSD_ATOL) -> float:
    """Uhlmann fidelity F = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    Computed via Hermitian eigendecompositions; eigenvalues slightly below
    zero (within ``psd_atol``) are clamped to zero.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise InvalidDims(f"shape mismatch {rho.shape} vs {sigma.shape}")
    w, v = hermitian_eig(rho)
    if w.min() < -psd_atol:
        raise InvalidState(f"rho has eigenvalue {w.min():.3e} below -{psd_atol}")
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    mid = sqrt_rho @ sigma @ sqrt_rho
    w2, _ = hermitian_eig((mid + mid.conj().T) / 2, atol=np.inf)
    if w2.min() < -psd_atol:
        raise InvalidState(f"sigma has eigenvalue {w2.min():.3e} below -{psd_atol}")
    root_sum = np.sqrt(np.clip(w2, 0.0, None)).sum()
    return float(min(root_sum**2, 1.0))


def apply_unitary(rho: np.ndarray, u: np.ndarray, atol: float = UNITARY_ATOL) -> np.ndarray:
    """Conjugate a state by a unitary: U rho U^dag."""
    rho = np.asarray(rho, dtype=complex)
    u = np.asarray(u, dtype=complex)
    if u.shape != rho.shape:
        raise InvalidDims(f"unitary shape {u.shape} does not match state {rho.shape}")
    defect = np.abs(u @ u.conj().T - np.eye(u.shape[0])).max()
    if defect > atol:
        raise InvalidUnitary(f"not unitary: max |U U^dag - I| = {defect:.3e}")
    return u @ rho @ u.conj().T


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Trace distance 0.5 * ||rho - sigma||_1 for Hermitian arguments."""
    diff = np.asarray(rho) - np.asarray(sigma)
    evals = np.linalg.eigvalsh((diff + diff.conj().T) / 2)
    return 0.5 * float(np.abs(evals).sum())
