"""Command-line interface.

Subcommands:

- ``symmaxent sweep --config cfg.txt [--out DIR]``: run a fidelity sweep and
  write result.csv, summary.csv, and meta.json.
- ``symmaxent summarize result.csv``: print per-r summary statistics.
- ``symmaxent solve --targets problem.json [--out FILE]``: one-shot
  estimation from explicit targets.

The sweep config is a flat ``key = value`` text file; nested solver and
noise fields use dotted keys (``solver.step_rule = newton``). Unset keys
keep their defaults. ``r_values`` accepts comma-separated entries, each an
integer or an inclusive ``lo-hi`` range, e.g. ``r_values = 1-20,30,63``.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import harness, observables, symmetry
from .harness import ExperimentConfig
from .linalg import HermitianOperator
from .maxent import MaxEntProblem, SolverOptions, solve
from .measurement import NoiseConfig

_BOOL_VALUES = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _parse_bool(raw: str) -> bool:
    try:
        return _BOOL_VALUES[raw.strip().lower()]
    except KeyError:
        raise ValueError(f"not a boolean: {raw!r}") from None


def _parse_r_values(raw: str) -> tuple[int, ...]:
    out: list[int] = []
    for token in raw.split(","):
        token = token.strip()
        if not token:
            continue
        if "-" in token:
            lo, hi = token.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(token))
    return tuple(out)


def parse_config_text(text: str) -> ExperimentConfig:
    """Build an ExperimentConfig from flat key = value lines."""
    flat: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value, got {line!r}")
        key, value = line.split("=", 1)
        flat[key.strip()] = value.strip()

    top: dict[str, object] = {}
    noise_kwargs: dict[str, object] = {}
    solver_kwargs: dict[str, object] = {}

    noise_fields = {f.name: f.type for f in dataclasses.fields(NoiseConfig)}
    solver_fields = {f.name: f.type for f in dataclasses.fields(SolverOptions)}

    def _convert(value: str, typename: str):
        if typename.startswith("bool"):
            return _parse_bool(value)
        if typename.startswith("int"):
            return int(value)
        if typename.startswith("float"):
            return float(value)
        return value

    for key, value in flat.items():
        if key.startswith("noise."):
            name = key[len("noise."):]
            if name not in noise_fields:
                raise ValueError(f"unknown noise field {name!r}")
            noise_kwargs[name] = _convert(value, noise_fields[name])
        elif key.startswith("solver."):
            name = key[len("solver."):]
            if name not in solver_fields:
                raise ValueError(f"unknown solver field {name!r}")
            solver_kwargs[name] = _convert(value, solver_fields[name])
        elif key == "r_values":
            top["r_values"] = _parse_r_values(value)
        elif key == "state_family":
            family = value
            if family.startswith("dicke(") and family.endswith(")"):
                top["dicke_excitations"] = int(family[len("dicke("):-1])
                family = "dicke"
            top["state_family"] = family
        elif key in ("n_qubits", "batch_size", "seed", "dicke_excitations"):
            top[key] = int(value)
        elif key == "shuffle_observables":
            top[key] = _parse_bool(value)
        elif key in ("observable_kind", "symmetry"):
            top[key] = value
        else:
            raise ValueError(f"unknown config key {key!r}")

    return ExperimentConfig(
        noise=NoiseConfig(**noise_kwargs),
        solver=SolverOptions(**solver_kwargs),
        **top,
    )


def _cmd_sweep(args) -> int:
    config = parse_config_text(Path(args.config).read_text())
    result = harness.run_sweep(config)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    harness.write_result_csv(outdir / "result.csv", result)
    harness.write_summary_csv(outdir / "summary.csv", result)
    harness.write_meta_json(outdir / "meta.json", result)
    print(f"wrote {outdir / 'result.csv'}")
    print(f"wrote {outdir / 'summary.csv'}")
    print(f"wrote {outdir / 'meta.json'}")
    return 0


def _cmd_summarize(args) -> int:
    records = harness.read_result_csv(args.result)
    rows = harness.summarize(records)
    sys.stdout.write(harness.summary_csv_text(rows))
    return 0


def _solve_problem_from_json(data: dict) -> dict:
    n_qubits = int(data["n_qubits"])
    dim = 2**n_qubits
    kind = data.get("observables", "custom")
    symmetry_kind = data.get("symmetry", "none")

    by_label = {}
    if kind in ("pauli", "sic"):
        canonical = observables.canonical_set(kind, n_qubits)
        by_label = {op.label: op for op in canonical}

    measured = []
    for entry in data["measured"]:
        target = float(entry["target"])
        if "matrix" in entry:
            op = HermitianOperator(
                observables.matrix_from_jsonable(entry["matrix"]),
                entry.get("label", f"custom-{len(measured)}"),
            )
        else:
            label = entry["label"]
            if label not in by_label:
                raise ValueError(f"unknown observable label {label!r} for kind {kind!r}")
            op = by_label[label]
        measured.append((op, target))

    spec = symmetry.build_symmetry(symmetry_kind, n_qubits)
    solver_kwargs = data.get("solver", {})
    options = SolverOptions(**solver_kwargs)
    problem = MaxEntProblem(tuple(measured), spec.auxiliary, dim)
    solution = solve(problem, options)
    return solution.to_jsonable()


def _cmd_solve(args) -> int:
    data = json.loads(Path(args.targets).read_text())
    payload = _solve_problem_from_json(data)
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symmaxent",
        description="Maximum-entropy quantum state estimation with symmetry constraints.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a fidelity-vs-r sweep from a config file")
    p_sweep.add_argument("--config", required=True, help="flat key = value config file")
    p_sweep.add_argument("--out", default=".", help="output directory (default: .)")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_sum = sub.add_parser("summarize", help="summarize a result.csv")
    p_sum.add_argument("result", help="path to result.csv")
    p_sum.set_defaults(func=_cmd_summarize)

    p_solve = sub.add_parser("solve", help="one-shot estimation from a targets JSON file")
    p_solve.add_argument("--targets", required=True, help="JSON problem description")
    p_solve.add_argument("--out", default="", help="output JSON path (default: stdout)")
    p_solve.set_defaults(func=_cmd_solve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
