"""Target-state construction, sampling, and state metrics.

Samplers take an explicit ``numpy.random.Generator`` owned by the caller, so
batch runs can hand each state its own independent stream.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import linalg

# Eigenvalues above this are accepted as numerically nonnegative; anything
# more negative is a genuinely invalid state, not rounding noise.
PSD_EIG_FLOOR = -1e-10

TRACE_TOL = 1e-10
NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PureState:
    """State vector on n qubits, unit norm."""

    amplitudes: np.ndarray
    n_qubits: int

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex).ravel()
        if amp.shape[0] != 2**self.n_qubits:
            raise ValueError(
                f"amplitude vector of length {amp.shape[0]} does not match {self.n_qubits} qubits"
            )
        nrm = np.linalg.norm(amp)
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValueError(f"state vector not normalized: |psi| = {nrm!r}")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.n_qubits)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Trace-one PSD Hermitian operator on (C^2)^{otimes n}."""

    matrix: np.ndarray
    n_qubits: int

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        dim = 2**self.n_qubits
        if m.shape != (dim, dim):
            raise ValueError(f"matrix shape {m.shape} does not match {self.n_qubits} qubits")
        dev = np.max(np.abs(m - m.conj().T))
        if dev > linalg.HERMITICITY_TOL:
            raise ValueError(f"density matrix not Hermitian (max deviation {dev:.3e})")
        m = (m + m.conj().T) / 2.0
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {tr!r} != 1")
        wmin = float(np.linalg.eigvalsh(m)[0])
        if wmin < PSD_EIG_FLOOR:
            raise ValueError(f"density matrix not PSD (min eigenvalue {wmin:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def haar_pure(n_qubits: int, rng: np.random.Generator) -> PureState:
    """Haar-random pure state: complex Gaussian vector, normalized."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    dim = 2**n_qubits
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(v / np.linalg.norm(v), n_qubits)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix with the
    phase-of-R fix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def dicke_basis(n_qubits: int) -> list[np.ndarray]:
    """Orthonormal basis of the symmetric subspace: one uniform-superposition
    vector per excitation number 0..n."""
    vecs = []
    dim = 2**n_qubits
    for k in range(n_qubits + 1):
        v = np.zeros(dim, dtype=complex)
        for idx in range(dim):
            if bin(idx).count("1") == k:
                v[idx] = 1.0
        vecs.append(v / np.linalg.norm(v))
    return vecs


def haar_symmetric_pure(n_qubits: int, rng: np.random.Generator) -> PureState:
    """Haar-random pure state within the (n+1)-dimensional symmetric
    subspace: complex Gaussian coefficients over the excitation-number basis,
    normalized. Outputs are fixed points of every two-qubit swap."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    basis = dicke_basis(n_qubits)
    c = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
    c /= np.linalg.norm(c)
    amp = sum(ci * vi for ci, vi in zip(c, basis))
    return PureState(amp, n_qubits)


def ghz(n_qubits: int) -> PureState:
    """(|0...0> + |1...1>)/sqrt(2)."""
    if n_qubits < 2:
        raise ValueError("n_qubits must be >= 2")
    dim = 2**n_qubits
    amp = np.zeros(dim, dtype=complex)
    amp[0] = amp[-1] = 1.0 / np.sqrt(2.0)
    return PureState(amp, n_qubits)


def dicke(n_qubits: int, n_excitations: int) -> PureState:
    """Uniform superposition of all basis states with fixed Hamming weight."""
    if not 0 <= n_excitations <= n_qubits:
        raise ValueError(f"n_excitations must be in [0, {n_qubits}], got {n_excitations}")
    dim = 2**n_qubits
    amp = np.zeros(dim, dtype=complex)
    coeff = 1.0 / math.sqrt(math.comb(n_qubits, n_excitations))
    for idx in range(dim):
        if bin(idx).count("1") == n_excitations:
            amp[idx] = coeff
    return PureState(amp, n_qubits)


@functools.lru_cache(maxsize=8)
def _collective_commutant_basis(n_qubits: int) -> np.ndarray:
    """Orthonormal (vectorized) basis of span{V_pi}, the commutant of the
    collective unitaries U^{otimes n}. For three qubits this span is
    5-dimensional: the six permutation matrices obey one linear relation
    (the antisymmetrizer vanishes)."""
    basis: list[np.ndarray] = []
    for perm in itertools.permutations(range(n_qubits)):
        v = linalg.permutation_matrix(n_qubits, perm).ravel()
        for q in basis:
            v = v - np.vdot(q, v) * q
        nv = np.linalg.norm(v)
        if nv > 1e-9:
            basis.append(v / nv)
    out = np.array(basis)
    out.setflags(write=False)
    return out


@functools.lru_cache(maxsize=8)
def _permutation_commutant_basis(n_qubits: int) -> np.ndarray:
    """Orthonormal (vectorized) basis of the operators commuting with every
    qubit permutation: the null space of the stacked swap-commutator
    superoperators. 20-dimensional for three qubits."""
    dim = 2**n_qubits
    rows = []
    for j in range(2, n_qubits + 1):
        perm = list(range(n_qubits))
        perm[0], perm[j - 1] = perm[j - 1], perm[0]
        p = linalg.permutation_matrix(n_qubits, perm)
        rows.append(np.kron(p, np.eye(dim)) - np.kron(np.eye(dim), p.T))
    _, svals, vh = np.linalg.svd(np.vstack(rows))
    rank = int(np.sum(svals > 1e-9 * svals[0]))
    out = vh[rank:].conj()
    out.setflags(write=False)
    return out


def _random_algebra_state(basis: np.ndarray, dim: int, rng: np.random.Generator) -> np.ndarray:
    """rho = T T^dagger / Tr(T T^dagger) for a Gaussian element T of the
    algebra spanned by ``basis``: the Ginibre construction carried out inside
    the invariant algebra. The algebra is closed under products and adjoints,
    so rho is exactly invariant; unlike twirling a full-space Ginibre state
    (which concentrates tightly around the maximally mixed state) the samples
    spread over the whole invariant family.
    """
    coeff = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
    t = (coeff @ basis).reshape(dim, dim)
    m = t @ t.conj().T
    return m / np.trace(m).real


def twirl(rho, n_qubits: int) -> DensityMatrix:
    """Average of rho over all collective unitaries U^{otimes n}.

    Computed exactly as the orthogonal (Hilbert-Schmidt) projection onto
    span{V_pi}, which equals the Haar average. Idempotent, trace- and
    PSD-preserving; the output commutes with the collective Pauli sums but,
    for n >= 3, not necessarily with individual permutation matrices.
    """
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    basis = _collective_commutant_basis(n_qubits)
    coeffs = basis.conj() @ mat.ravel()
    out = (coeffs @ basis).reshape(mat.shape)
    out = (out + out.conj().T) / 2.0
    return DensityMatrix(out, n_qubits)


def permutation_average(rho, n_qubits: int) -> DensityMatrix:
    """Average of rho over the qubit-permutation group: the projection onto
    permutationally invariant states."""
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    acc = np.zeros_like(mat)
    count = 0
    for perm in itertools.permutations(range(n_qubits)):
        v = linalg.permutation_matrix(n_qubits, perm)
        acc += v @ mat @ v.conj().T
        count += 1
    return DensityMatrix(acc / count, n_qubits)


def random_density(n_qubits: int, rng: np.random.Generator) -> DensityMatrix:
    """Hilbert-Schmidt-uniform mixed state: rho = G G^dagger / Tr(G G^dagger)
    with G complex Ginibre."""
    dim = 2**n_qubits
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, n_qubits)


def random_werner(n_qubits: int, rng: np.random.Generator) -> DensityMatrix:
    """Random state invariant under all collective unitaries.

    Sampled as a Ginibre state inside span{V_pi} itself (see
    :func:`_random_algebra_state`); the twirl of a full-space Ginibre state
    would be exactly invariant too but concentrates at purity ~ 1/2^n, which
    collapses the fidelity-vs-r curves of the family into a flat line.
    """
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    dim = 2**n_qubits
    basis = _collective_commutant_basis(n_qubits)
    return DensityMatrix(_random_algebra_state(basis, dim, rng), n_qubits)


def random_permutation_invariant_mixed(n_qubits: int, rng: np.random.Generator) -> DensityMatrix:
    """Random mixed state commuting with every qubit permutation: a Ginibre
    state inside the permutation commutant (20 parameters for three qubits,
    versus the (n+1)-dimensional pure symmetric subspace)."""
    if n_qubits < 2:
        raise ValueError("n_qubits must be >= 2")
    dim = 2**n_qubits
    basis = _permutation_commutant_basis(n_qubits)
    return DensityMatrix(_random_algebra_state(basis, dim, rng), n_qubits)


def add_white_noise(psi: PureState, eta: float) -> DensityMatrix:
    """(1 - eta)|psi><psi| + eta I / 2^n."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must be in [0, 1], got {eta}")
    dim = psi.dim
    proj = np.outer(psi.amplitudes, psi.amplitudes.conj())
    return DensityMatrix((1.0 - eta) * proj + (eta / dim) * np.eye(dim), psi.n_qubits)


def mix_with_identity(rho: DensityMatrix, eta: float) -> DensityMatrix:
    """(1 - eta) rho + eta I / dim; the mixed-state analogue of
    :func:`add_white_noise`."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must be in [0, 1], got {eta}")
    return DensityMatrix(
        (1.0 - eta) * rho.matrix + (eta / rho.dim) * np.eye(rho.dim), rho.n_qubits
    )


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Tr sqrt(sqrt(rho) sigma sqrt(rho)); 1 iff the states coincide."""
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    s = linalg.psd_sqrtm(rho.matrix)
    inner = s @ sigma.matrix @ s
    inner = (inner + inner.conj().T) / 2.0
    w = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(min(np.sum(np.sqrt(w)), 1.0))


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2), in [1/dim, 1]."""
    return float(np.vdot(rho.matrix, rho.matrix).real)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-Tr(rho ln rho) in nats, with 0 ln 0 = 0."""
    w = np.clip(np.linalg.eigvalsh(rho.matrix), 0.0, None)
    w = w[w > 0.0]
    return float(-np.sum(w * np.log(w)))
