"""Command-line front end.

Every command builds a JSON document first; text and CSV output are
renderings of that document, never separate code paths. Exit codes:
0 success, 1 I/O or parse failure, 2 invalid state, 3 internal assertion
(oracle mismatch).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import circuit, pointer, protocol, robustness, states

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID_STATE = 2
EXIT_INTERNAL = 3

COMMANDS = (
    "validate",
    "detect",
    "detect-pure",
    "tomo",
    "pointer-sim",
    "circuit-verify",
    "robustness",
    "benchmark",
)

_NEEDS_INPUT = {"validate", "detect", "detect-pure", "tomo", "pointer-sim", "robustness"}

CIRCUIT_EPSILONS = (1e-3, 1e-2, 0.1, 0.5, 1.0)


@dataclass(frozen=True)
class RunConfig:
    command: str
    input_path: str | None
    epsilon: float
    sigma: float
    grid_n: int
    grid_l: float
    seed: int
    trials: int
    delta: float
    tol_det: float | None
    output: str


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags by default; the documented parse-failure
    # code is 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="weakdetect", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", dest="input_path", metavar="PATH", default=None)
        p.add_argument("--epsilon", type=float, default=1e-3)
        p.add_argument("--sigma", type=float, default=1.0)
        p.add_argument("--grid-n", type=int, default=4096)
        p.add_argument("--grid-l", type=float, default=40.0)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int, default=1000)
        p.add_argument("--delta", type=float, default=1e-2)
        p.add_argument("--tol-det", dest="tol_det", type=float, default=None)
        p.add_argument("--format", dest="output", choices=("json", "text", "csv"),
                       default="json")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        command=args.command,
        input_path=args.input_path,
        epsilon=args.epsilon,
        sigma=args.sigma,
        grid_n=args.grid_n,
        grid_l=args.grid_l,
        seed=args.seed,
        trials=args.trials,
        delta=args.delta,
        tol_det=args.tol_det,
        output=args.output,
    )
    if cfg.command in _NEEDS_INPUT and cfg.input_path is None:
        raise _UsageError(f"{cfg.command} requires --input PATH")
    return cfg


class _UsageError(ValueError):
    pass


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _load_state(cfg: RunConfig) -> states.TwoQubitState:
    return states.state_from_json_dict(_load_json(cfg.input_path))


def _tau_det(cfg: RunConfig) -> float:
    return cfg.tol_det if cfg.tol_det is not None else states.TAU_DET


def _sim_config(cfg: RunConfig, epsilon: float | None = None) -> pointer.SimConfig:
    grid = pointer.PointerGrid(n=cfg.grid_n, half_extent=cfg.grid_l)
    return pointer.SimConfig(
        epsilon=cfg.epsilon if epsilon is None else epsilon,
        sigma=cfg.sigma,
        grid=grid,
    )


def _pair(value: complex) -> list[float]:
    return [float(value.real), float(value.imag)]


def cmd_validate(cfg: RunConfig):
    try:
        rho = _load_state(cfg)
    except states.StateValidationError as exc:
        doc = {
            "command": "validate",
            "valid": False,
            "error_kind": type(exc).__name__,
            "message": str(exc),
        }
        return doc, None, EXIT_INVALID_STATE
    doc = {
        "command": "validate",
        "valid": True,
        "diagonal": [float(d) for d in rho.diagonal()],
        "trace": float(np.trace(rho.matrix).real),
        "min_eigenvalue": float(np.linalg.eigvalsh(rho.matrix)[0]),
    }
    return doc, None, EXIT_OK


def cmd_detect(cfg: RunConfig):
    rho = _load_state(cfg)
    report = protocol.detect(rho, tau_det=_tau_det(cfg))
    return report.to_json_dict(), None, EXIT_OK


def cmd_detect_pure(cfg: RunConfig):
    psi = states.amplitudes_from_json_dict(_load_json(cfg.input_path))
    report = protocol.detect_pure_local(psi)
    return report.to_json_dict(), None, EXIT_OK


def cmd_tomo(cfg: RunConfig):
    rho = _load_state(cfg)
    wv = protocol.weak_values_all(rho)
    diag = protocol.diagonals_from_postselection(rho)
    rebuilt = protocol.reconstruct(wv, diag)
    distance = states.trace_distance(rho, rebuilt)
    doc = {
        "command": "tomo",
        "trace_distance": float(distance),
        "diagonal": [float(d) for d in diag],
        "reconstructed": states.state_to_json_dict(rebuilt),
    }
    return doc, None, EXIT_OK


def cmd_pointer_sim(cfg: RunConfig):
    rho = _load_state(cfg)
    exact = protocol.weak_values_all(rho)
    full = pointer.estimate_weak_values(rho, _sim_config(cfg))
    half = pointer.estimate_weak_values(rho, _sim_config(cfg, epsilon=cfg.epsilon / 2))
    half_by_k = {ro.k: ro for ro in half}
    outcomes = {}
    errors, errors_half = [], []
    for readout in full:
        exact_value = exact.values.get(readout.k)
        if exact_value is None:
            continue
        err = abs(readout.estimate - exact_value)
        errors.append(err)
        entry = {
            "estimate": _pair(readout.estimate),
            "exact": _pair(exact_value),
            "abs_error": float(err),
            "postselect_prob": float(readout.postselect_prob),
        }
        if readout.k in half_by_k:
            err_half = abs(half_by_k[readout.k].estimate - exact_value)
            errors_half.append(err_half)
            entry["abs_error_half"] = float(err_half)
        outcomes[str(readout.k)] = entry
    max_err = max(errors, default=0.0)
    max_err_half = max(errors_half, default=0.0)
    ratio = float(max_err / max_err_half) if max_err_half > 0 else None
    doc = {
        "command": "pointer-sim",
        "epsilon": cfg.epsilon,
        "sigma": cfg.sigma,
        "grid_n": cfg.grid_n,
        "grid_l": cfg.grid_l,
        "max_abs_error": float(max_err),
        "max_abs_error_half_epsilon": float(max_err_half),
        "convergence_ratio": ratio,
        "outcomes": outcomes,
    }
    rows = [
        [k, *entry["estimate"], *entry["exact"], entry["abs_error"]]
        for k, entry in sorted(outcomes.items(), key=lambda kv: int(kv[0]))
    ]
    return doc, rows, EXIT_OK


def cmd_circuit_verify(cfg: RunConfig):
    eps_grid = sorted(set(CIRCUIT_EPSILONS) | {cfg.epsilon})
    per_eps = {}
    for eps in eps_grid:
        per_eps[repr(eps)] = {
            "circuit_vs_unitary": circuit.verify_equivalence(eps),
            "unitary_vs_exponential": circuit.unitary_vs_hamiltonian(eps),
        }
    doc = {
        "command": "circuit-verify",
        "epsilons": [float(e) for e in eps_grid],
        "max_deviation": max(
            max(v.values()) for v in per_eps.values()
        ),
        "per_epsilon": per_eps,
    }
    rows = [
        [eps, per_eps[repr(eps)]["circuit_vs_unitary"],
         per_eps[repr(eps)]["unitary_vs_exponential"]]
        for eps in eps_grid
    ]
    return doc, rows, EXIT_OK


def cmd_robustness(cfg: RunConfig):
    rho = _load_state(cfg)
    report = robustness.bound_check(rho, cfg.delta, cfg.trials, cfg.seed)
    doc = {"command": "robustness", **report.to_json_dict()}
    return doc, report.csv_rows(), EXIT_OK


def cmd_benchmark(cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    tau = _tau_det(cfg)
    agreement = {
        "entangled_entangled": 0,
        "separable_separable": 0,
        "entangled_separable": 0,
        "separable_entangled": 0,
    }
    mismatches = 0
    distances = []
    rows = []
    for trial in range(cfg.trials):
        rho = states.random_mixed(rng)
        verdict = protocol.detect(rho, tau_det=tau).verdict
        oracle = states.ppt_oracle(rho, tau=tau)
        key = f"{verdict.value.lower()}_{oracle.value.lower()}"
        agreement[key] += 1
        if verdict is not oracle:
            mismatches += 1
        wv = protocol.weak_values_all(rho)
        diag = protocol.diagonals_from_postselection(rho)
        rebuilt = protocol.reconstruct(wv, diag)
        distance = states.trace_distance(rho, rebuilt)
        distances.append(distance)
        rows.append([trial, verdict.value, oracle.value,
                     int(verdict is oracle), distance])
    doc = {
        "command": "benchmark",
        "trials": cfg.trials,
        "seed": cfg.seed,
        "agreement": agreement,
        "mismatches": mismatches,
        "agreement_rate": (cfg.trials - mismatches) / cfg.trials if cfg.trials else 1.0,
        "reconstruction": {
            "max_trace_distance": max(distances, default=0.0),
            "mean_trace_distance": (
                float(sum(distances) / len(distances)) if distances else 0.0
            ),
        },
    }
    return doc, rows, EXIT_OK


_HANDLERS = {
    "validate": cmd_validate,
    "detect": cmd_detect,
    "detect-pure": cmd_detect_pure,
    "tomo": cmd_tomo,
    "pointer-sim": cmd_pointer_sim,
    "circuit-verify": cmd_circuit_verify,
    "robustness": cmd_robustness,
    "benchmark": cmd_benchmark,
}


def _flatten(doc, prefix: str = "") -> list[tuple[str, object]]:
    items: list[tuple[str, object]] = []
    if isinstance(doc, dict):
        for key, value in doc.items():
            items.extend(_flatten(value, f"{prefix}{key}." if prefix else f"{key}."))
    else:
        items.append((prefix.rstrip("."), doc))
    return items


def render(doc: dict, rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, separators=(", ", ": "))
    if fmt == "text":
        return "\n".join(f"{key}: {value}" for key, value in _flatten(doc))
    # csv: native rows when the command has a tabular form, else key,value
    if rows is not None:
        return "\n".join(",".join(repr(float(c)) if isinstance(c, float) else str(c)
                                  for c in row) for row in rows)
    return "\n".join(f"{key},{value}" for key, value in _flatten(doc))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        cfg = _config_from_args(args)
        doc, rows, code = _HANDLERS[cfg.command](cfg)
    except _UsageError as exc:
        print(f"weakdetect: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OSError, json.JSONDecodeError, states.SchemaError) as exc:
        print(f"weakdetect: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (states.StateValidationError, robustness.RankDeficientError,
            protocol.NoSignalError) as exc:
        print(f"weakdetect: invalid state: {exc}", file=sys.stderr)
        return EXIT_INVALID_STATE
    except protocol.OracleMismatchError as exc:
        print(f"weakdetect: internal assertion failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    print(render(doc, rows, cfg.output))
    return code


def main_entry() -> None:
    sys.exit(main())
