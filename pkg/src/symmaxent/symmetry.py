"""Symmetry groups as estimation constraints.

A declared symmetry contributes a set of generators Q_k (swap operators for
qubit-permutation symmetry, collective Pauli sums for invariance under
U x ... x U) and, from them, auxiliary constraint observables i[Q_k, O_j]
built against an operator basis {O_j}. A state commutes with every Q_k
exactly when all auxiliary expectation values vanish, so the auxiliaries
enter the estimation problem as extra constraints with target zero.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from . import linalg
from .linalg import HermitianOperator
from .observables import ObservableSet, pauli_labels

KINDS = ("none", "permutation", "werner")

# Auxiliary candidates with Hilbert-Schmidt norm below this are the exactly
# vanishing commutators (O_j commuting with Q_k) and are dropped.
ZERO_COMMUTATOR_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SymmetryGroupSpec:
    """A symmetry kind plus its generators and auxiliary observables."""

    kind: str
    n_qubits: int
    generators: tuple[HermitianOperator, ...]
    auxiliary: tuple[HermitianOperator, ...]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown symmetry kind {self.kind!r}")
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "auxiliary", tuple(self.auxiliary))


def permutation_operator(n_qubits: int, i: int, j: int) -> HermitianOperator:
    """Swap of tensor factors i and j (1-based, i < j). Hermitian, unitary,
    and involutory."""
    if not 1 <= i < j <= n_qubits:
        raise ValueError(f"need 1 <= i < j <= {n_qubits}, got i={i}, j={j}")
    perm = list(range(n_qubits))
    perm[i - 1], perm[j - 1] = perm[j - 1], perm[i - 1]
    return HermitianOperator(linalg.permutation_matrix(n_qubits, perm), f"P{i}{j}")


def permutation_generators(n_qubits: int) -> list[HermitianOperator]:
    """Transpositions [P_12, P_13, ..., P_1n]; together they generate the
    full qubit-permutation group."""
    if n_qubits < 2:
        raise ValueError("permutation symmetry needs at least 2 qubits")
    return [permutation_operator(n_qubits, 1, j) for j in range(2, n_qubits + 1)]


def werner_generators(n_qubits: int) -> list[HermitianOperator]:
    """Collective Pauli sums sum_l sigma_k^(l) for k in {x, y, z}.

    The k = 0 collective operator is n times the identity; its commutators
    vanish identically, so it contributes no constraints and is omitted.
    """
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    dim = 2**n_qubits
    out = []
    for name in "XYZ":
        acc = np.zeros((dim, dim), dtype=complex)
        for pos in range(n_qubits):
            acc += linalg.kron_all(
                linalg.PAULI_1Q[name] if q == pos else linalg.PAULI_1Q["I"]
                for q in range(n_qubits)
            )
        out.append(HermitianOperator(acc, f"S{name.lower()}"))
    return out


def generators_for(kind: str, n_qubits: int) -> list[HermitianOperator]:
    if kind == "none":
        return []
    if kind == "permutation":
        return permutation_generators(n_qubits)
    if kind == "werner":
        return werner_generators(n_qubits)
    raise ValueError(f"unknown symmetry kind {kind!r}")


def full_pauli_operator_basis(n_qubits: int) -> list[HermitianOperator]:
    """The 4^n Pauli tensor products including the identity: a Hermitian
    operator basis with orthogonal elements, used as the default {O_j}."""
    return [
        HermitianOperator(linalg.kron_all(linalg.PAULI_1Q[c] for c in label), label)
        for label in pauli_labels(n_qubits, include_identity=True)
    ]


def auxiliary_observables(
    kind: str,
    n_qubits: int,
    operator_basis: list[HermitianOperator] | None = None,
) -> list[HermitianOperator]:
    """Linearly independent auxiliary observables i[Q_k, O_j].

    Candidates are symmetrized, rescaled to unit Hilbert-Schmidt norm (the
    target value zero is scale-free and unit scaling conditions the solver),
    and reduced to a linearly independent subset in construction order. For
    three qubits the permutation group yields 44 of them.
    """
    if kind == "none":
        return []
    if operator_basis is None:
        operator_basis = full_pauli_operator_basis(n_qubits)
    dim = 2**n_qubits
    if len(operator_basis) != dim * dim:
        raise ValueError(
            f"operator basis must have {dim * dim} elements, got {len(operator_basis)}"
        )
    rank = len(linalg.linearly_independent_subset(operator_basis))
    if rank != dim * dim:
        raise ValueError(f"operator basis does not span: rank {rank} < {dim * dim}")

    candidates: list[HermitianOperator] = []
    for gen in generators_for(kind, n_qubits):
        for j, op in enumerate(operator_basis):
            comm = 1j * linalg.commutator(gen, op)
            comm = (comm + comm.conj().T) / 2.0
            nrm = np.linalg.norm(comm)
            if nrm <= ZERO_COMMUTATOR_TOL:
                continue
            candidates.append(
                HermitianOperator(comm / nrm, f"aux-{gen.label}-O{j:02d}")
            )
    kept = linalg.linearly_independent_subset(candidates)
    return [candidates[i] for i in kept]


@functools.lru_cache(maxsize=16)
def build_symmetry(kind: str, n_qubits: int) -> SymmetryGroupSpec:
    """Generators plus auxiliary observables for a symmetry kind, built
    against the full Pauli operator basis."""
    gens = generators_for(kind, n_qubits)
    aux = auxiliary_observables(kind, n_qubits) if kind != "none" else []
    return SymmetryGroupSpec(kind, n_qubits, tuple(gens), tuple(aux))


def filter_measured_observables(
    candidates: ObservableSet, aux: tuple[HermitianOperator, ...] | list[HermitianOperator]
) -> ObservableSet:
    """Order-preserving subset of ``candidates`` in which every element is
    linearly independent of the auxiliaries and of the candidates kept before
    it. Measuring a rejected candidate would add no information beyond what
    the symmetry constraints already pin down."""
    aux = tuple(aux)
    if aux and aux[0].dim != 2**candidates.n_qubits:
        raise ValueError("auxiliary dimension does not match candidates")
    kept = linalg.linearly_independent_subset(list(candidates), seed_ops=aux)
    return ObservableSet(
        tuple(candidates[i] for i in kept), "custom", candidates.n_qubits
    )


def all_permutation_matrices(n_qubits: int) -> list[np.ndarray]:
    """Matrix representation of every qubit permutation."""
    return [
        linalg.permutation_matrix(n_qubits, perm)
        for perm in itertools.permutations(range(n_qubits))
    ]
