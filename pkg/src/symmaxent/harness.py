"""Experiment orchestration: batch sampling, observable-count sweeps, solver
invocation with or without symmetry constraints, and CSV/JSON result files.

Protocol per state: sample a target from the configured family, optionally
mix in white noise, order the canonical observable set (optionally shuffled
per state), discard observables linearly dependent on the symmetry
auxiliaries (measuring them would add nothing the symmetry does not already
pin down), acquire targets for the surviving list, then for each sweep point
r solve the maximum-entropy problem from the first r surviving observables
and record the fidelity against the prepared (noisy) state.

Every random stream is derived from (seed, state_id, purpose), so results
are bit-identical across reruns and independent of worker scheduling.
"""

from __future__ import annotations

import dataclasses
import functools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__, linalg, measurement, observables, states, symmetry
from .maxent import MaxEntProblem, SolverOptions, solve
from .measurement import NoiseConfig

STATE_FAMILIES = (
    "haar_pure",
    "permutation_invariant",
    "permutation_invariant_mixed",
    "werner",
    "ghz",
    "dicke",
)

THREADS_ENV_VAR = "SYMMAXENT_THREADS"

RESULT_CSV_HEADER = "state_id,r,fidelity,converged,iterations"
SUMMARY_CSV_HEADER = "r,mean_f,std_f,n_converged"


@dataclass(frozen=True)
class ExperimentConfig:
    n_qubits: int = 3
    state_family: str = "haar_pure"
    dicke_excitations: int = 1
    observable_kind: str = "pauli"
    symmetry: str = "none"
    batch_size: int = 100
    r_values: tuple[int, ...] = ()
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    solver: SolverOptions = field(default_factory=SolverOptions)
    seed: int = 0
    shuffle_observables: bool = False

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        if self.state_family not in STATE_FAMILIES:
            raise ValueError(f"unknown state_family {self.state_family!r}")
        if self.observable_kind not in ("pauli", "sic"):
            raise ValueError(f"unknown observable_kind {self.observable_kind!r}")
        if self.symmetry not in symmetry.KINDS:
            raise ValueError(f"unknown symmetry {self.symmetry!r}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        n_total = 4**self.n_qubits - 1
        r_values = tuple(int(r) for r in self.r_values)
        if not r_values:
            r_values = tuple(range(1, n_total + 1))
        for r in r_values:
            if not 0 <= r <= n_total:
                raise ValueError(f"r value {r} outside [0, {n_total}]")
        object.__setattr__(self, "r_values", r_values)
        if not 0 <= self.dicke_excitations <= self.n_qubits:
            raise ValueError("dicke_excitations outside [0, n_qubits]")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


@dataclass(frozen=True)
class StateRunRecord:
    state_id: int
    r: int
    fidelity: float
    converged: bool
    iterations: int


@dataclass(frozen=True)
class SummaryRow:
    r: int
    mean_f: float
    std_f: float
    n_converged: int


@dataclass(frozen=True)
class SweepResult:
    records: tuple[StateRunRecord, ...]
    summary: tuple[SummaryRow, ...]
    metadata: dict


def _stream(seed: int, state_id: int, purpose: int, extra: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, state_id, purpose, extra]))


def _sample_target(config: ExperimentConfig, rng: np.random.Generator) -> states.DensityMatrix:
    n = config.n_qubits
    family = config.state_family
    if family == "haar_pure":
        return states.add_white_noise(states.haar_pure(n, rng), config.noise.eta)
    if family == "permutation_invariant":
        return states.add_white_noise(states.haar_symmetric_pure(n, rng), config.noise.eta)
    if family == "ghz":
        return states.add_white_noise(states.ghz(n), config.noise.eta)
    if family == "dicke":
        return states.add_white_noise(
            states.dicke(n, config.dicke_excitations), config.noise.eta
        )
    if family == "permutation_invariant_mixed":
        return states.mix_with_identity(
            states.random_permutation_invariant_mixed(n, rng), config.noise.eta
        )
    if family == "werner":
        return states.mix_with_identity(states.random_werner(n, rng), config.noise.eta)
    raise ValueError(f"unknown state_family {family!r}")


@functools.lru_cache(maxsize=8)
def _observable_context(kind: str, n_qubits: int, symmetry_kind: str):
    """Canonical observables plus the symmetry spec; cached per worker."""
    candidates = observables.canonical_set(kind, n_qubits)
    spec = symmetry.build_symmetry(symmetry_kind, n_qubits)
    return candidates, spec


def _acquire_target_value(rho, op, config: ExperimentConfig, rng) -> float:
    if config.noise.mode == "ideal":
        return observables.expectation(rho, op)
    modes = measurement.projector_modes(op)
    records = measurement.simulate_counts(rho, modes, config.noise, rng, op.label)
    return measurement.estimate_expectations(records, op, config.noise)


def run_single_state(config: ExperimentConfig, state_id: int) -> list[StateRunRecord]:
    """All sweep points for one state; used directly by the worker pool."""
    candidates, spec = _observable_context(
        config.observable_kind, config.n_qubits, config.symmetry
    )
    rho_target = _sample_target(config, _stream(config.seed, state_id, 0))

    order = list(range(len(candidates)))
    if config.shuffle_observables:
        _stream(config.seed, state_id, 1).shuffle(order)
    ordered = [candidates[i] for i in order]

    if config.symmetry != "none":
        kept = linalg.linearly_independent_subset(ordered, seed_ops=spec.auxiliary)
    else:
        kept = list(range(len(ordered)))
    filtered = [ordered[i] for i in kept]
    # measurement streams key on the pre-shuffle canonical index
    filtered_orig = [order[i] for i in kept]

    max_r = min(max(config.r_values), len(filtered))
    targets = [
        _acquire_target_value(
            rho_target,
            filtered[i],
            config,
            _stream(config.seed, state_id, 2, filtered_orig[i]),
        )
        for i in range(max_r)
    ]

    out = []
    for r in config.r_values:
        k = min(r, len(filtered))
        problem = MaxEntProblem(
            measured=tuple((filtered[i], targets[i]) for i in range(k)),
            auxiliary=spec.auxiliary,
            dim=2**config.n_qubits,
        )
        solution = solve(problem, config.solver)
        fid = states.fidelity(rho_target, solution.rho)
        out.append(StateRunRecord(state_id, r, fid, solution.converged, solution.iterations))
    return out


def _worker(args) -> list[StateRunRecord]:
    config, state_id = args
    return run_single_state(config, state_id)


def worker_count(batch_size: int) -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "")
    if raw.strip():
        n = int(raw)
        if n < 1:
            raise ValueError(f"{THREADS_ENV_VAR} must be >= 1, got {raw!r}")
    else:
        n = os.cpu_count() or 1
    return max(1, min(n, batch_size))


def run_sweep(config: ExperimentConfig) -> SweepResult:
    """Run the full batch; deterministic given config.seed regardless of the
    number of workers."""
    n_workers = worker_count(config.batch_size)
    if n_workers == 1:
        per_state = [run_single_state(config, s) for s in range(config.batch_size)]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            per_state = list(
                pool.map(
                    _worker,
                    [(config, s) for s in range(config.batch_size)],
                    chunksize=max(1, config.batch_size // (4 * n_workers)),
                )
            )
    records = tuple(rec for chunk in per_state for rec in chunk)
    records = tuple(sorted(records, key=lambda rec: (rec.state_id, rec.r)))
    return SweepResult(
        records=records,
        summary=tuple(summarize(records)),
        metadata=config_metadata(config),
    )


def summarize(records) -> list[SummaryRow]:
    """Per-r mean and population standard deviation of the fidelity, over all
    batch states including non-converged solves."""
    if hasattr(records, "records"):
        records = records.records
    records = list(records)
    if not records:
        raise ValueError("no records to summarize")
    by_r: dict[int, list[StateRunRecord]] = {}
    for rec in records:
        by_r.setdefault(rec.r, []).append(rec)
    rows = []
    for r in sorted(by_r):
        fids = np.array([rec.fidelity for rec in by_r[r]])
        rows.append(
            SummaryRow(
                r=r,
                mean_f=float(fids.mean()),
                std_f=float(fids.std()),
                n_converged=sum(1 for rec in by_r[r] if rec.converged),
            )
        )
    return rows


def config_metadata(config: ExperimentConfig) -> dict:
    return {
        "artifact": "symmaxent",
        "version": __version__,
        "std_convention": "population",
        "config": dataclasses.asdict(config),
    }


def mean_fidelity_by_r(result: SweepResult) -> dict[int, float]:
    return {row.r: row.mean_f for row in result.summary}


def write_result_csv(path, result: SweepResult) -> None:
    with open(path, "w") as fh:
        fh.write(RESULT_CSV_HEADER + "\n")
        for rec in result.records:
            fh.write(
                f"{rec.state_id},{rec.r},{rec.fidelity:.17g},"
                f"{'true' if rec.converged else 'false'},{rec.iterations}\n"
            )


def write_summary_csv(path, result: SweepResult) -> None:
    with open(path, "w") as fh:
        fh.write(summary_csv_text(result.summary))


def summary_csv_text(summary) -> str:
    lines = [SUMMARY_CSV_HEADER]
    for row in summary:
        lines.append(f"{row.r},{row.mean_f:.17g},{row.std_f:.17g},{row.n_converged}")
    return "\n".join(lines) + "\n"


def write_meta_json(path, result: SweepResult) -> None:
    with open(path, "w") as fh:
        json.dump(result.metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_result_csv(path) -> list[StateRunRecord]:
    records = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != RESULT_CSV_HEADER:
            raise ValueError(f"unexpected result header: {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            state_id, r, fid, conv, iters = line.split(",")
            records.append(
                StateRunRecord(int(state_id), int(r), float(fid), conv == "true", int(iters))
            )
    return records
