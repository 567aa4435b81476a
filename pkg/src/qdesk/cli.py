"""Command-line front end: JSON reports, seeding, majority-vote amplifier.

Every command emits a single JSON report, either to stdout or to the file
given with ``--output``.  Reports are byte-reproducible for a fixed seed:
floats are serialized with 12 significant digits, keys are sorted, and the
wall-clock time is logged to stderr rather than written into the report.
The master seed comes from ``--seed``, else the ``QDESK_SEED`` environment
variable, else the documented default.  Sub-seeds for independent streams
are derived from the master seed and a position index, never by sharing
generator state.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from importlib import resources
from typing import Any, Callable

import numpy as np

from . import __version__, grover, qft, shor, simon, statevec
from .gates import Circuit, GateOp, cnot_op, cphase_op, h_op, swap_op, toffoli_op

DEFAULT_SEED = 1729
SEED_ENV_VAR = "QDESK_SEED"

COMMANDS = ("factor", "grover", "simon", "simon-classical", "qft", "circuit-run")


@dataclass(frozen=True)
class RunConfig:
    """A parsed command invocation."""

    command: str
    seed: int
    output_path: str | None
    params: dict[str, Any]


@dataclass(frozen=True)
class RunReport:
    """A finished run: config echo, result payload, version tag.

    ``wall_time_s`` is carried on the object for callers but deliberately
    left out of the JSON so identical configs serialize byte-identically.
    """

    command: str
    config: dict[str, Any]
    result: dict[str, Any]
    version: str
    wall_time_s: float

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "config": _round_floats(self.config),
            "result": _round_floats(self.result),
            "version": self.version,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _round_floats(obj: Any) -> Any:
    """Recursively normalize a payload: 12 significant digits, plain types."""
    if isinstance(obj, dict):
        return {str(k): _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.12g}")
    return obj


# ---------------------------------------------------------------------------
# majority-vote amplifier
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MajorityVote:
    """Outcome of repeated trials decided by majority."""

    outcome: bool
    successes: int
    failures: int


def majority_amplify(
    trial: Callable[[int], bool], trials: int, rng_seed: int
) -> MajorityVote:
    """Run a boolean-outcome procedure repeatedly and take the majority.

    Each trial receives its own sub-seed derived from (rng_seed, index).
    ``trials`` must be odd so there is never a tie.  Amplification only
    helps when the per-trial success probability exceeds one half.
    """
    if trials < 1 or trials % 2 == 0:
        raise ValueError(f"trials must be an odd positive integer, got {trials}")
    successes = 0
    for i in range(trials):
        if trial(statevec.derive_seed(rng_seed, i)):
            successes += 1
    return MajorityVote(successes > trials // 2, successes, trials - successes)


# ---------------------------------------------------------------------------
# circuit text format
# ---------------------------------------------------------------------------

_GATE_ARITY = {"H": 1, "CNOT": 2, "SWAP": 2, "TOFFOLI": 3, "CPHASE": 2}


class CircuitSyntaxError(ValueError):
    """Parse failure carrying a line/column diagnostic."""

    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def parse_circuit_text(text: str, n_wires: int | None = None) -> Circuit:
    """Parse the line-oriented circuit format into a Circuit.

    Grammar (one op per line; blank lines and ``#`` comments ignored)::

        H 1
        CNOT 1,4
        SWAP 2,3
        TOFFOLI 1,2,3
        CPHASE 2,5 j=1 k=3

    When ``n_wires`` is omitted it defaults to the largest wire mentioned.
    """
    ops: list[GateOp] = []
    max_wire = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        tokens = line.split()
        name = tokens[0]
        column = raw.index(name) + 1
        if name not in _GATE_ARITY:
            raise CircuitSyntaxError(
                lineno, column,
                f"unknown gate {name!r}; valid names: {', '.join(sorted(_GATE_ARITY))}",
            )
        if len(tokens) < 2:
            raise CircuitSyntaxError(lineno, len(raw) + 1, f"{name} needs wire indices")
        wire_token = tokens[1]
        wire_col = raw.index(wire_token, column) + 1
        try:
            wires = tuple(int(w) for w in wire_token.split(","))
        except ValueError:
            raise CircuitSyntaxError(
                lineno, wire_col, f"bad wire list {wire_token!r}"
            ) from None
        if len(wires) != _GATE_ARITY[name]:
            raise CircuitSyntaxError(
                lineno, wire_col,
                f"{name} takes {_GATE_ARITY[name]} wires, got {len(wires)}",
            )
        params = {}
        for tok in tokens[2:]:
            key, eq, value = tok.partition("=")
            if not eq or key not in ("j", "k") or not value.lstrip("-").isdigit():
                raise CircuitSyntaxError(
                    lineno, raw.index(tok, wire_col) + 1, f"bad parameter {tok!r}"
                )
            params[key] = int(value)
        try:
            if name == "H":
                ops.append(h_op(*wires))
            elif name == "CNOT":
                ops.append(cnot_op(*wires))
            elif name == "SWAP":
                ops.append(swap_op(*wires))
            elif name == "TOFFOLI":
                ops.append(toffoli_op(*wires))
            else:  # CPHASE
                if sorted(params) != ["j", "k"]:
                    raise CircuitSyntaxError(
                        lineno, column, "CPHASE needs parameters j=<int> k=<int>"
                    )
                ops.append(cphase_op(params["j"], params["k"], *wires))
        except CircuitSyntaxError:
            raise
        except ValueError as exc:
            raise CircuitSyntaxError(lineno, column, str(exc)) from None
        max_wire = max(max_wire, *wires)
    if n_wires is None:
        if max_wire == 0:
            raise ValueError(
                "empty circuit file: pass the wire count explicitly (--wires)"
            )
        n_wires = max_wire
    return Circuit(n_wires, tuple(ops))


def parse_circuit_file(path: str, n_wires: int | None = None) -> Circuit:
    """Read and parse a circuit file (see :func:`parse_circuit_text`)."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_circuit_text(fh.read(), n_wires)


def circuit_to_text(circuit: Circuit) -> str:
    """Emit a circuit in the line-oriented text format."""
    lines = []
    for op in circuit.ops:
        if op.name not in _GATE_ARITY:
            raise ValueError(f"gate {op.name!r} has no text form")
        wires = ",".join(str(w) for w in op.wires)
        if op.name == "CPHASE":
            j, k = op.params
            lines.append(f"CPHASE {wires} j={j} k={k}")
        else:
            lines.append(f"{op.name} {wires}")
    return "\n".join(lines) + ("\n" if lines else "")


def distribution_to_json(probs: np.ndarray, n_qubits: int) -> dict[str, float]:
    """Map zero-padded bit strings to probabilities, omitting zero entries."""
    return {
        format(i, f"0{n_qubits}b"): float(p)
        for i, p in enumerate(probs)
        if p > 0.0
    }


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------

def _run_factor(seed: int, params: dict[str, Any]) -> dict[str, Any]:
    n = params["n"]
    report = shor.factor(n, params["max_attempts"], seed)
    result = {
        "N": n,
        "succeeded": report.succeeded,
        "factors": list(report.factors) if report.factors else None,
        "x": report.x,
        "measured_c": report.measured_c,
        "recovered_r": report.recovered_r,
        "failure": report.failure,
        "attempts": [
            {
                "x": a.x,
                "measured_c": a.measured_c,
                "recovered_r": a.recovered_r,
                "factors": list(a.factors) if a.factors else None,
                "failure": a.failure,
                "lucky_gcd": a.lucky_gcd,
            }
            for a in report.attempts
        ],
    }
    dump_path = params.get("dump_distribution")
    if dump_path:
        circuit_attempts = [a for a in report.attempts if a.measured_c is not None]
        if circuit_attempts:
            x = circuit_attempts[-1].x
            dist = shor.first_register_distribution(shor.FactoringInstance(n, x))
            payload = {
                "N": n,
                "x": x,
                "distribution": {
                    str(c): float(p) for c, p in enumerate(dist) if p > 1e-15
                },
            }
        else:
            payload = {"N": n, "x": None, "distribution": {}}
        _write_text(dump_path, json.dumps(_round_floats(payload), indent=2, sort_keys=True) + "\n")
    return result


def _run_grover(seed: int, params: dict[str, Any]) -> dict[str, Any]:
    k = params["qubits"]
    targets = sorted(set(params["targets"]))
    for t in targets:
        if not 0 <= t < (1 << k):
            raise ValueError(f"target {t} out of range [0, {1 << k})")
    target_set = frozenset(targets)
    problem = grover.SearchProblem(k, lambda i: i in target_set, len(target_set))
    result_obj = grover.run_grover(problem, seed)
    if params.get("trace_path"):
        trace = {"marked_probability": list(result_obj.trace)}
        _write_text(
            params["trace_path"],
            json.dumps(_round_floats(trace), indent=2, sort_keys=True) + "\n",
        )
    return {
        "qubits": k,
        "n_items": problem.N,
        "targets": targets,
        "found": result_obj.found,
        "success": result_obj.success,
        "success_probability": result_obj.success_probability,
        "iterations": result_obj.iterations,
        "oracle_calls": result_obj.oracle_calls,
    }


def _run_simon(seed: int, params: dict[str, Any]) -> dict[str, Any]:
    n = params["n"]
    c = int(params["c"], 2)
    max_rounds = params.get("max_rounds") or 4 * n
    oracle = simon.make_oracle(n, c, statevec.derive_seed(seed, 0))
    result = simon.run_simon(oracle, max_rounds, statevec.derive_seed(seed, 1))
    return {
        "n": n,
        "c": format(c, f"0{n}b"),
        "recovered_c": format(result.c, f"0{n}b") if result.c is not None else None,
        "succeeded": result.succeeded,
        "rounds": result.rounds,
        "samples": [format(y, f"0{n}b") for y in result.samples],
    }


def _run_simon_classical(seed: int, params: dict[str, Any]) -> dict[str, Any]:
    n = params["n"]
    trials = params["trials"]
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    shift_rng = statevec.make_rng(statevec.derive_seed(seed, 0))
    queries = []
    for i in range(trials):
        c = int(shift_rng.integers(1, 1 << n))
        oracle = simon.make_oracle(n, c, statevec.derive_seed(seed, i, 1))
        outcome = simon.classical_query_baseline(oracle, statevec.derive_seed(seed, i, 2))
        if oracle.f(0) != oracle.f(outcome.c):
            raise AssertionError("classical collision produced a bad shift")
        queries.append(outcome.queries)
    arr = np.asarray(queries)
    return {
        "n": n,
        "trials": trials,
        "queries": {
            "median": float(np.median(arr)),
            "mean": float(arr.mean()),
            "min": int(arr.min()),
            "max": int(arr.max()),
        },
    }


def _run_qft(seed: int, params: dict[str, Any]) -> dict[str, Any]:
    spec = qft.QftSpec(
        k=params["qubits"],
        approx_cutoff=params.get("cutoff"),
        include_bit_reversal_swaps=not params.get("no_swaps", False),
    )
    circuit = qft.build_qft_circuit(spec)
    counts = qft.gate_counts(circuit)
    if params.get("emit_circuit_path"):
        _write_text(params["emit_circuit_path"], circuit_to_text(circuit))
    fidelity = None
    if spec.k <= qft.FIDELITY_MAX_QUBITS:
        fidelity = qft.qft_fidelity(spec.k, circuit)
    return {
        "qubits": spec.k,
        "cutoff": spec.approx_cutoff,
        "swaps": spec.include_bit_reversal_swaps,
        "gate_counts": counts,
        "hadamard_phase_gates": counts.get("H", 0) + counts.get("CPHASE", 0),
        "total_ops": len(circuit),
        "fidelity": fidelity,
    }


def _run_circuit_file(seed: int, params: dict[str, Any]) -> dict[str, Any]:
    circuit = parse_circuit_file(params["file"], params.get("wires"))
    state = statevec.run_circuit(statevec.init_basis(circuit.n_wires, 0), circuit)
    probs = statevec.distribution(state)
    return {
        "n_wires": circuit.n_wires,
        "ops": len(circuit),
        "distribution": distribution_to_json(probs, circuit.n_wires),
    }


_HANDLERS: dict[str, Callable[[int, dict[str, Any]], dict[str, Any]]] = {
    "factor": _run_factor,
    "grover": _run_grover,
    "simon": _run_simon,
    "simon-classical": _run_simon_classical,
    "qft": _run_qft,
    "circuit-run": _run_circuit_file,
}


def run(config: RunConfig) -> RunReport:
    """Dispatch a validated config to its command handler."""
    if config.command not in _HANDLERS:
        raise ValueError(f"unknown command {config.command!r}")
    start = time.perf_counter()
    result = _HANDLERS[config.command](config.seed, config.params)
    elapsed = time.perf_counter() - start
    config_echo = {"seed": config.seed}
    config_echo.update(
        {k: v for k, v in config.params.items() if not k.endswith("_path")}
    )
    return RunReport(
        command=config.command,
        config=config_echo,
        result=result,
        version=__version__,
        wall_time_s=elapsed,
    )


def _write_text(path: str, text: str) -> None:
    """Write a file atomically (temp file in place, then rename)."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def get_report_schema() -> dict[str, Any]:
    """Load the frozen JSON schema the reports validate against."""
    text = resources.files("qdesk").joinpath("report_schema.json").read_text()
    return json.loads(text)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _default_seed() -> int:
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdesk",
        description="Desk-scale quantum algorithm simulator with JSON reports.",
    )
    parser.add_argument("--version", action="version", version=f"qdesk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None,
                       help=f"master seed (default: ${SEED_ENV_VAR} or {DEFAULT_SEED})")
        p.add_argument("--output", type=str, default=None,
                       help="write the JSON report here instead of stdout")

    p = sub.add_parser("factor", help="factor an odd composite by order finding")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-attempts", type=int, default=8)
    p.add_argument("--dump-distribution", type=str, default=None,
                   help="write the measured-register distribution to this file")
    common(p)

    p = sub.add_parser("grover", help="amplitude-amplification search")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--target", type=int, action="append", default=None,
                   help="marked index (repeatable)")
    p.add_argument("--targets-file", type=str, default=None,
                   help="file with one marked index per line")
    p.add_argument("--trace", type=str, default=None,
                   help="write per-iteration marked probability to this file")
    common(p)

    p = sub.add_parser("simon", help="hidden-shift finding, quantum rounds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=str, required=True, help="hidden shift as a bit string")
    p.add_argument("--max-rounds", type=int, default=None)
    common(p)

    p = sub.add_parser("simon-classical", help="classical collision baseline")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    common(p)

    p = sub.add_parser("qft", help="build a Fourier circuit, report counts/fidelity")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--cutoff", type=int, default=None)
    p.add_argument("--no-swaps", action="store_true")
    p.add_argument("--emit-circuit", type=str, default=None,
                   help="write the circuit in the text format to this file")
    common(p)

    p = sub.add_parser("circuit-run", help="run a circuit file on the zero state")
    p.add_argument("--file", type=str, required=True)
    p.add_argument("--wires", type=int, default=None)
    common(p)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    seed = args.seed if args.seed is not None else _default_seed()
    params: dict[str, Any]
    if args.command == "factor":
        params = {
            "n": args.n,
            "max_attempts": args.max_attempts,
            "dump_distribution": args.dump_distribution,
        }
    elif args.command == "grover":
        targets = list(args.target or [])
        if args.targets_file:
            with open(args.targets_file, "r", encoding="utf-8") as fh:
                targets.extend(int(line) for line in fh if line.strip())
        if not targets:
            raise ValueError("grover needs --target or --targets-file")
        params = {"qubits": args.qubits, "targets": targets,
                  "trace_path": args.trace}
    elif args.command == "simon":
        if not args.c or set(args.c) - {"0", "1"}:
            raise ValueError(f"--c must be a bit string, got {args.c!r}")
        if len(args.c) != args.n:
            raise ValueError(f"--c must have exactly n={args.n} bits, got {args.c!r}")
        params = {"n": args.n, "c": args.c, "max_rounds": args.max_rounds}
    elif args.command == "simon-classical":
        params = {"n": args.n, "trials": args.trials}
    elif args.command == "qft":
        params = {"qubits": args.qubits, "cutoff": args.cutoff,
                  "no_swaps": args.no_swaps,
                  "emit_circuit_path": args.emit_circuit}
    elif args.command == "circuit-run":
        params = {"file": args.file, "wires": args.wires}
    else:
        raise ValueError(f"unknown command {args.command!r}")
    return RunConfig(args.command, seed, args.output, params)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        report = run(config)
    except statevec.CapacityError as exc:
        _emit(getattr(args, "output", None),
              json.dumps({"error": {"type": "resource", "message": str(exc)}},
                         indent=2, sort_keys=True) + "\n")
        return 3
    except (ValueError, OSError) as exc:
        _emit(getattr(args, "output", None),
              json.dumps({"error": {"type": "domain", "message": str(exc)}},
                         indent=2, sort_keys=True) + "\n")
        return 1
    _emit(config.output_path, report.to_json())
    print(f"qdesk: {config.command} finished in {report.wall_time_s:.3f}s",
          file=sys.stderr)
    return 0


def _emit(output_path: str | None, text: str) -> None:
    if output_path:
        _write_text(output_path, text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    sys.exit(main())
