"""End-to-end pipeline: benchmark -> compile -> inject -> report.

A RunConfig pins every knob, so a pipeline run is a pure function of its
config; artifacts are written atomically (a .partial temp file renamed
on success, so an interrupted run leaves only .partial debris) and a
manifest records the digest of every artifact for staleness checks.
"""

from __future__ import annotations

import contextlib
import hashlib
import json
import os
from dataclasses import asdict, dataclass

from .errors import ValidationError, VdqecError


@contextlib.contextmanager
def _stage(name: str):
    """Prefix any toolkit error with the pipeline stage that raised it."""
    try:
        yield
    except VdqecError as exc:
        exc.args = (f"stage {name}: {exc}",)
        raise
from .inject import MODES, profile_to_json, run_campaign
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
from .sim import circuit_to_json
from .synth import DEFAULT_MAX_LENGTH, compile_circuit

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    counting_qubits: int = 5
    phase_num: int = 5
    phase_den: int = 32
    synthesis_epsilon: float = 0.015
    max_length: int = DEFAULT_MAX_LENGTH
    injection_mode: str = "mirrored"
    prefactor: float = 0.03
    threshold: float = 0.0057
    distance_configs: tuple[tuple[int, ...], ...] = (
        (3,), (3, 5), (5,), (5, 7), (7,),
    )
    p_min: float = 1e-5
    p_max: float = 1e-2
    p_points: int = 50
    tau: float = 0.9
    include_resize: bool = True

    def __post_init__(self):
        if self.injection_mode not in MODES:
            raise ValidationError(
                f"injection_mode must be one of {MODES}"
            )
        if self.synthesis_epsilon <= 0:
            raise ValidationError("synthesis_epsilon must be positive")
        for cfg in self.distance_configs:
            if len(cfg) not in (1, 2):
                raise ValidationError(
                    f"distance config must have 1 or 2 entries, got {cfg}"
                )


def config_from_json(doc: dict) -> RunConfig:
    if doc.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise ValidationError(
            f"unsupported config schema_version {doc.get('schema_version')}"
        )
    known = {f for f in RunConfig.__dataclass_fields__}
    unknown = set(doc) - known - {"schema_version"}
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {k: v for k, v in doc.items() if k in known}
    if "distance_configs" in kwargs:
        kwargs["distance_configs"] = tuple(
            tuple(int(d) for d in cfg) for cfg in kwargs["distance_configs"]
        )
    try:
        return RunConfig(**kwargs)
    except TypeError as exc:
        raise ValidationError(f"malformed config: {exc}") from exc


def config_to_json(config: RunConfig) -> dict:
    doc = asdict(config)
    doc["distance_configs"] = [list(cfg) for cfg in config.distance_configs]
    doc["schema_version"] = SCHEMA_VERSION
    return doc


def _json_bytes(doc: dict) -> bytes:
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode()


def write_atomic(path: str, data: bytes) -> None:
    tmp = path + ".partial"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _label_filename(label: str) -> str:
    return "assignment_" + label.replace("=", "").replace(",", "_") + ".json"


def run_pipeline(config: RunConfig, out_dir: str, threads: int = 1) -> dict:
    """Run every stage and write all artifacts into out_dir.

    Returns the manifest (also written as manifest.json)."""
    os.makedirs(out_dir, exist_ok=True)
    artifacts: dict[str, bytes] = {}

    with _stage("benchmark"):
        spec = QpeSpec(config.counting_qubits, config.phase_num, config.phase_den)
        circuit, correct = build_qpe(spec)
        artifacts["circuit.json"] = _json_bytes(
            {"circuit": circuit_to_json(circuit), "correct_bitstring": correct}
        )

    with _stage("compile"):
        compiled = compile_circuit(
            circuit, config.synthesis_epsilon, config.max_length
        )
        artifacts["compiled.json"] = _json_bytes(
            {"circuit": circuit_to_json(compiled), "correct_bitstring": correct}
        )

    with _stage("inject"):
        profile = run_campaign(compiled, correct, config.injection_mode, threads)
        artifacts["profile.json"] = _json_bytes(profile_to_json(profile))

    with _stage("heatmap"):
        artifacts["heatmap.csv"] = heatmap_csv_bytes(profile)
        artifacts["heatmap.svg"] = heatmap_svg_bytes(profile)

    with _stage("assign"):
        params = ErrorModelParams(config.prefactor, config.threshold)
        assignments = []
        for cfg in config.distance_configs:
            if len(cfg) == 1:
                assignments.append(uniform_assignment(profile.num_qubits, cfg[0]))
            else:
                assignments.append(
                    assign_two_distance(profile, cfg[0], cfg[1], config.tau)
                )
        for assignment in assignments:
            artifacts[_label_filename(assignment.label)] = _json_bytes(
                assignment_to_json(assignment)
            )

    with _stage("tts"):
        grid = log_p_grid(config.p_min, config.p_max, config.p_points)
        points = sweep_tts(
            profile, assignments, grid, params, config.include_resize
        )
        artifacts["sweep.csv"] = sweep_csv_bytes(points)
        artifacts["curves.svg"] = curves_svg_bytes(points)

    for name, data in artifacts.items():
        write_atomic(os.path.join(out_dir, name), data)

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "config": config_to_json(config),
        "circuit_digest": profile.circuit_digest,
        "artifacts": {
            name: hashlib.sha256(data).hexdigest()
            for name, data in sorted(artifacts.items())
        },
    }
    write_atomic(os.path.join(out_dir, "manifest.json"), _json_bytes(manifest))
    return manifest
