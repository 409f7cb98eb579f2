"""Command line interface.

Exit codes: 0 success, 1 internal failure during a computation,
2 invalid arguments or malformed/missing input files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys

from . import __version__
from .errors import StaleCacheError, ValidationError, VdqecError
from .inject import MODES, profile_from_json, profile_to_json, run_campaign
from .pipeline import (
    RunConfig,
    config_from_json,
    run_pipeline,
    write_atomic,
    _json_bytes,
)
from .qecc import (
    ErrorModelParams,
    assign_two_distance,
    assignment_to_json,
    log_p_grid,
    sweep_tts,
    uniform_assignment,
)
from .qpe import QpeSpec, build_qpe
from .render import (
    curves_svg_bytes,
    heatmap_csv_bytes,
    heatmap_svg_bytes,
    sweep_csv_bytes,
)
from .sim import (
    circuit_digest,
    circuit_from_json,
    circuit_to_json,
    output_distribution,
    pst,
    simulate,
)
from .synth import DEFAULT_MAX_LENGTH, approximate_rz, compile_circuit

_THETA_RE = re.compile(r"^\s*(-?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")


def parse_theta(text: str) -> float:
    """Accepts plain floats plus forms like 'pi/3', '-pi/4', '5pi/32'."""
    m = _THETA_RE.match(text)
    if m:
        num = m.group(1)
        factor = float(num) if num not in ("", "-") else (-1.0 if num == "-" else 1.0)
        theta = factor * math.pi
        if m.group(2):
            theta /= float(m.group(2))
        return theta
    try:
        return float(text)
    except ValueError:
        raise ValidationError(f"cannot parse angle {text!r}") from None


def _read_json(path: str) -> dict:
    if not os.path.exists(path):
        raise ValidationError(f"missing input file: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc


def _read_circuit(path: str):
    """Load a circuit file; returns (circuit, correct_bitstring or None).

    Accepts both a bare circuit document and the {"circuit": ...,
    "correct_bitstring": ...} wrapper the qpe command emits."""
    doc = _read_json(path)
    if "circuit" in doc:
        return circuit_from_json(doc["circuit"]), doc.get("correct_bitstring")
    return circuit_from_json(doc), None


def _read_profile(path: str, circuit_path: str | None):
    profile = profile_from_json(_read_json(path))
    if circuit_path:
        circuit, _ = _read_circuit(circuit_path)
        if circuit_digest(circuit) != profile.circuit_digest:
            raise StaleCacheError(
                f"profile {path} was computed for a different circuit than "
                f"{circuit_path}; refusing stale cache"
            )
    return profile


def _emit(data: bytes, out: str | None) -> None:
    if out:
        write_atomic(out, data)
    else:
        sys.stdout.write(data.decode())


def cmd_qpe(args) -> int:
    spec = QpeSpec(args.counting, args.phase_num, args.phase_den)
    circuit, correct = build_qpe(spec)
    if args.compile is not None:
        circuit = compile_circuit(circuit, args.compile, args.max_length)
    doc = {"circuit": circuit_to_json(circuit), "correct_bitstring": correct}
    _emit(_json_bytes(doc), args.output)
    return 0


def cmd_synth(args) -> int:
    report = approximate_rz(parse_theta(args.theta), args.epsilon, args.max_length)
    doc = {
        "sequence": report.sequence,
        "target_theta": report.target_theta,
        "achieved_distance": report.achieved_distance,
        "length": report.length,
        "converged": report.converged,
    }
    _emit(_json_bytes(doc), args.output)
    return 0


def cmd_compile(args) -> int:
    circuit, correct = _read_circuit(args.circuit)
    compiled = compile_circuit(circuit, args.epsilon, args.max_length)
    doc = {"circuit": circuit_to_json(compiled)}
    if correct is not None:
        doc["correct_bitstring"] = correct
    _emit(_json_bytes(doc), args.output)
    return 0


def cmd_simulate(args) -> int:
    circuit, correct = _read_circuit(args.circuit)
    state = simulate(circuit)
    dist = output_distribution(state, circuit.measured_qubits)
    doc = {"distribution": {k: dist[k] for k in sorted(dist)}}
    bitstring = args.bitstring or correct
    if bitstring is not None:
        doc["pst"] = pst(dist, bitstring)
        doc["correct_bitstring"] = bitstring
    _emit(_json_bytes(doc), args.output)
    return 0


def cmd_inject(args) -> int:
    circuit, correct = _read_circuit(args.circuit)
    bitstring = args.bitstring or correct
    if bitstring is None:
        raise ValidationError(
            "no correct bitstring: pass --bitstring or use a circuit file "
            "that carries one"
        )
    mode = "full-depolarizing" if args.mode == "full" else args.mode
    profile = run_campaign(circuit, bitstring, mode, args.threads)
    _emit(_json_bytes(profile_to_json(profile)), args.output)
    if args.out_csv:
        write_atomic(args.out_csv, heatmap_csv_bytes(profile))
    if args.out_svg:
        write_atomic(args.out_svg, heatmap_svg_bytes(profile))
    return 0


def cmd_heatmap(args) -> int:
    profile = _read_profile(args.profile, args.circuit)
    write_atomic(args.out_csv, heatmap_csv_bytes(profile))
    write_atomic(args.out_svg, heatmap_svg_bytes(profile))
    return 0


def cmd_assign(args) -> int:
    profile = _read_profile(args.profile, args.circuit)
    assignment = assign_two_distance(profile, args.d_low, args.d_high, args.tau)
    _emit(_json_bytes(assignment_to_json(assignment)), args.output)
    return 0


def _parse_distance_config(text: str) -> tuple[int, ...]:
    try:
        cfg = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValidationError(f"bad distance config {text!r}") from None
    if len(cfg) not in (1, 2):
        raise ValidationError(f"distance config needs 1 or 2 entries: {text!r}")
    return cfg


def cmd_tts(args) -> int:
    profile = _read_profile(args.profile, args.circuit)
    params = ErrorModelParams(args.prefactor, args.threshold)
    assignments = []
    for text in args.configs:
        cfg = _parse_distance_config(text)
        if len(cfg) == 1:
            assignments.append(uniform_assignment(profile.num_qubits, cfg[0]))
        else:
            assignments.append(
                assign_two_distance(profile, cfg[0], cfg[1], args.tau)
            )
    grid = log_p_grid(args.p_min, args.p_max, args.p_points)
    points = sweep_tts(profile, assignments, grid, params, not args.no_resize)
    write_atomic(args.out_csv, sweep_csv_bytes(points))
    if args.out_svg:
        write_atomic(args.out_svg, curves_svg_bytes(points))
    return 0


def cmd_pipeline(args) -> int:
    if args.config:
        config = config_from_json(_read_json(args.config))
    else:
        config = RunConfig()
    run_pipeline(config, args.out_dir, args.threads)
    return 0


def _threads_default() -> int:
    env = os.environ.get("VDQEC_THREADS")
    return int(env) if env else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vdqec",
        description="Fault sensitivity profiling and variable-distance "
        "surface-code cost modeling for small Clifford+T circuits.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qpe", help="emit the phase estimation benchmark circuit")
    p.add_argument("--counting", type=int, default=5)
    p.add_argument("--phase-num", type=int, default=5)
    p.add_argument("--phase-den", type=int, default=32)
    p.add_argument("--compile", type=float, default=None, metavar="EPS",
                   help="also compile rotations to Clifford+T at this accuracy")
    p.add_argument("--max-length", type=int, default=DEFAULT_MAX_LENGTH)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_qpe)

    p = sub.add_parser("synth", help="approximate one Rz rotation")
    p.add_argument("--theta", required=True, help="radians; accepts 'pi/3' forms")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--max-length", type=int, default=DEFAULT_MAX_LENGTH)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("compile", help="rewrite a circuit over Clifford+T+CNOT")
    p.add_argument("--circuit", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--max-length", type=int, default=DEFAULT_MAX_LENGTH)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("simulate", help="exact output distribution of a circuit")
    p.add_argument("--circuit", required=True)
    p.add_argument("--bitstring", default=None, help="also report the PST")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("inject", help="run an exhaustive fault campaign")
    p.add_argument("--circuit", required=True)
    p.add_argument("--bitstring", default=None)
    p.add_argument("--mode", choices=list(MODES) + ["full"], default="mirrored")
    p.add_argument("--threads", type=int, default=_threads_default())
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--out-csv", default=None)
    p.add_argument("--out-svg", default=None)
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("heatmap", help="render a profile as CSV and SVG")
    p.add_argument("--profile", required=True)
    p.add_argument("--circuit", default=None,
                   help="verify the profile matches this circuit")
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-svg", required=True)
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("assign", help="derive a two-distance code assignment")
    p.add_argument("--profile", required=True)
    p.add_argument("--circuit", default=None)
    p.add_argument("--d-low", type=int, default=3)
    p.add_argument("--d-high", type=int, default=5)
    p.add_argument("--tau", type=float, default=0.9)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_assign)

    p = sub.add_parser("tts", help="time-to-solution sweep over error rates")
    p.add_argument("--profile", required=True)
    p.add_argument("--circuit", default=None)
    p.add_argument("--configs", nargs="+", default=["3", "3,5", "5", "5,7", "7"],
                   help="distance configs, e.g. 3 or 3,5")
    p.add_argument("--p-min", type=float, default=1e-5)
    p.add_argument("--p-max", type=float, default=1e-2)
    p.add_argument("--p-points", type=int, default=50)
    p.add_argument("--tau", type=float, default=0.9)
    p.add_argument("--prefactor", type=float, default=0.03)
    p.add_argument("--threshold", type=float, default=0.0057)
    p.add_argument("--no-resize", action="store_true",
                   help="exclude patch resize cycles from latency")
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-svg", default=None)
    p.set_defaults(func=cmd_tts)

    p = sub.add_parser("pipeline", help="run every stage into a directory")
    p.add_argument("--config", default=None, help="RunConfig JSON file")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--threads", type=int, default=_threads_default())
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VdqecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
