"""Dense complex-matrix kernel shared by every other module.

All operators are plain square numpy arrays of complex128. Operators with a
physical identity (observables, symmetry generators, auxiliary constraint
operators) are wrapped in :class:`HermitianOperator`, which validates
hermiticity on construction and symmetrizes away accumulated rounding error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Max-abs entrywise deviation from M == M^dagger tolerated on construction.
HERMITICITY_TOL = 1e-12

# Default relative tolerance for linear-independence decisions.
LI_TOL = 1e-9

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def kron_all(factors) -> np.ndarray:
    """Kronecker product of a sequence of matrices, leftmost factor first."""
    out = np.array([[1.0]], dtype=complex)
    for f in factors:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def permutation_matrix(n_qubits: int, perm) -> np.ndarray:
    """Unitary that permutes tensor factors of (C^2)^{otimes n}.

    ``perm`` is a length-``n_qubits`` sequence: the factor at position ``q``
    of the output was at position ``perm[q]`` of the input (0-based, qubit 0
    is the leftmost / most significant factor).
    """
    perm = list(perm)
    if sorted(perm) != list(range(n_qubits)):
        raise ValueError(f"not a permutation of range({n_qubits}): {perm}")
    dim = 2**n_qubits
    mat = np.zeros((dim, dim), dtype=complex)
    for src in range(dim):
        bits = [(src >> (n_qubits - 1 - q)) & 1 for q in range(n_qubits)]
        dst = 0
        for q in range(n_qubits):
            dst = (dst << 1) | bits[perm[q]]
        mat[dst, src] = 1.0
    return mat


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """A labelled Hermitian matrix.

    The matrix is validated (square, finite, Hermitian within
    ``HERMITICITY_TOL`` max-abs entrywise) and replaced by its Hermitian part
    (M + M^dagger)/2 so that later eigendecompositions see an exactly
    Hermitian input.
    """

    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator {self.label!r}: matrix must be square, got {m.shape}")
        if m.shape[0] < 1:
            raise ValueError(f"operator {self.label!r}: empty matrix")
        if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
            raise ValueError(f"operator {self.label!r}: non-finite entries")
        dev = np.max(np.abs(m - m.conj().T))
        if dev > HERMITICITY_TOL:
            raise ValueError(
                f"operator {self.label!r}: not Hermitian "
                f"(max |M - M^dag| = {dev:.3e} > {HERMITICITY_TOL})"
            )
        m = (m + m.conj().T) / 2.0
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def as_matrix(op) -> np.ndarray:
    """Accept a HermitianOperator or a raw array; return the ndarray."""
    if isinstance(op, HermitianOperator):
        return op.matrix
    return np.asarray(op, dtype=complex)


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def commutator(a, b) -> np.ndarray:
    """AB - BA. For Hermitian A, B the result is anti-Hermitian; i*(AB - BA)
    is the Hermitian operator used as a symmetry constraint."""
    ma, mb = as_matrix(a), as_matrix(b)
    _check_same_dim(ma, mb)
    return ma @ mb - mb @ ma


def eigh(h):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, V)`` with eigenvalues ``w`` ascending and unitary ``V``
    such that h = V diag(w) V^dagger.
    """
    m = as_matrix(h)
    dev = np.max(np.abs(m - m.conj().T))
    if dev > HERMITICITY_TOL:
        raise ValueError(f"eigh: input not Hermitian (max |M - M^dag| = {dev:.3e})")
    w, v = np.linalg.eigh(m)
    return w, v


def hermitian_expm(h) -> np.ndarray:
    """exp(H) for Hermitian H via eigendecomposition.

    No spectrum shift is applied here; callers that exponentiate large
    operators must shift by the top eigenvalue themselves and absorb the
    scalar into their normalization (as the Gibbs-state construction does).
    """
    w, v = eigh(h)
    return (v * np.exp(w)) @ v.conj().T


def psd_sqrtm(m) -> np.ndarray:
    """Principal square root of a positive-semidefinite Hermitian matrix.

    Eigenvalues in [-1e-10, 0) are treated as rounding noise and clamped to
    zero; anything more negative raises.
    """
    w, v = eigh(m)
    if w[0] < -1e-10:
        raise ValueError(f"psd_sqrtm: matrix not PSD (min eigenvalue {w[0]:.3e})")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product Tr(A^dagger B)."""
    ma, mb = as_matrix(a), as_matrix(b)
    _check_same_dim(ma, mb)
    return complex(np.vdot(ma, mb))


def hs_norm(a) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    return float(np.linalg.norm(as_matrix(a)))


def linearly_independent_subset(ops, seed_ops=(), tol: float = LI_TOL) -> list[int]:
    """Greedy extraction of a linearly independent subset of ``ops``.

    Operators are vectorized and processed in input order; an element is kept
    when its residual after projecting onto span(seed_ops + kept so far)
    exceeds ``tol`` times its own norm. Modified Gram-Schmidt with a second
    orthogonalization pass keeps the decision stable for near-dependent sets.

    Returns the kept indices into ``ops``; elements dependent on the seeds
    alone are never kept.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    basis: list[np.ndarray] = []

    def _orthogonalize(vec: np.ndarray) -> np.ndarray:
        for _ in range(2):
            for q in basis:
                vec = vec - np.vdot(q, vec) * q
        return vec

    for s in seed_ops:
        v = as_matrix(s).ravel()
        n0 = np.linalg.norm(v)
        if n0 == 0.0:
            continue
        v = _orthogonalize(v.copy())
        nv = np.linalg.norm(v)
        if nv > tol * n0:
            basis.append(v / nv)

    kept: list[int] = []
    for idx, op in enumerate(ops):
        v = as_matrix(op).ravel()
        n0 = np.linalg.norm(v)
        if n0 == 0.0:
            continue
        v = _orthogonalize(v.copy())
        nv = np.linalg.norm(v)
        if nv > tol * n0:
            kept.append(idx)
            basis.append(v / nv)
    return kept
