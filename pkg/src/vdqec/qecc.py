"""Surface-code cost model: logical error rates, PST lower bounds,
latency, and time-to-solution sweeps.

The logical error rate of a distance-d patch at physical error rate p is
modeled as prefactor * (p / threshold)^((d+1)/2), clamped to [0, 1]. A
code assignment gives every qubit a piecewise-constant distance over
timesteps, so a qubit can run cheaply at low distance while it is
insensitive and be escalated once errors start to matter.

The PST lower bound keeps only the zero-error and exactly-one-error
terms of the logical error process: with q_g the probability that gate
g suffers a logical fault,

    PST >= PST_ideal * prod_g (1 - q_g)
         + sum_g q_g * prod_{g' != g} (1 - q_g') * mean_g PST_noisy

where mean_g PST_noisy is the campaign's mean post-fault PST at gate g.
Discarding the multi-error mass can only lower the estimate, so this is
a true lower bound for the depolarizing-style error model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AssignmentError, ValidationError
from .inject import SensitivityProfile
from .sim import Circuit

INFINITE_TTS = math.inf


@dataclass(frozen=True)
class ErrorModelParams:
    prefactor: float = 0.03
    threshold: float = 0.0057

    def __post_init__(self):
        if self.prefactor <= 0 or self.threshold <= 0:
            raise ValidationError("prefactor and threshold must be positive")


DEFAULT_PARAMS = ErrorModelParams()


@dataclass(frozen=True)
class CodeAssignment:
    """Per-qubit distance schedules.

    schedules[q] is a tuple of (start_timestep, distance) segments with
    strictly increasing starts and nondecreasing odd distances >= 3; the
    first segment must start at timestep 0 so every timestep is covered.
    """

    label: str
    num_qubits: int
    schedules: tuple[tuple[tuple[int, int], ...], ...]

    def __post_init__(self):
        if len(self.schedules) != self.num_qubits:
            raise AssignmentError("one schedule per qubit is required")
        for q, segs in enumerate(self.schedules):
            if not segs or segs[0][0] != 0:
                raise AssignmentError(
                    f"qubit {q}: schedule must start at timestep 0"
                )
            prev_start, prev_d = None, None
            for start, d in segs:
                if d < 3 or d % 2 == 0:
                    raise AssignmentError(
                        f"qubit {q}: distance must be odd and >= 3, got {d}"
                    )
                if prev_start is not None and start <= prev_start:
                    raise AssignmentError(
                        f"qubit {q}: segment starts must increase"
                    )
                if prev_d is not None and d < prev_d:
                    raise AssignmentError(
                        f"qubit {q}: distances may only grow over time"
                    )
                prev_start, prev_d = start, d

    def distance_at(self, qubit: int, timestep: int) -> int:
        if not (0 <= qubit < self.num_qubits):
            raise AssignmentError(f"qubit {qubit} outside assignment")
        if timestep < 0:
            raise AssignmentError(f"timestep {timestep} not covered")
        d = None
        for start, dist in self.schedules[qubit]:
            if start <= timestep:
                d = dist
            else:
                break
        return d

    def resize_cost(self) -> int:
        """Cycles spent growing patches: max(old, new) per distance change."""
        total = 0
        for segs in self.schedules:
            for (_, d_old), (_, d_new) in zip(segs, segs[1:]):
                if d_new != d_old:
                    total += max(d_old, d_new)
        return total


def uniform_assignment(
    num_qubits: int, distance: int, label: str | None = None
) -> CodeAssignment:
    if label is None:
        label = f"d={distance}"
    schedules = tuple((((0, distance),)) for _ in range(num_qubits))
    return CodeAssignment(label, num_qubits, schedules)


def assign_two_distance(
    profile: SensitivityProfile, d_low: int, d_high: int, tau: float = 0.9
) -> CodeAssignment:
    """Escalate each qubit from d_low to d_high at its earliest cell whose
    mean relative PST drops below tau; qubits that never drop stay low."""
    if not (0.0 <= tau <= 1.0):
        raise ValidationError(f"tau must be in [0, 1], got {tau}")
    if d_high < d_low:
        raise ValidationError("d_high must be >= d_low")
    cells = profile.cells
    schedules = []
    for q in range(profile.num_qubits):
        times = sorted(t for (qq, t) in cells if qq == q)
        escalate_at = None
        for t in times:
            if cells[(q, t)].mean_relative_pst < tau:
                escalate_at = t
                break
        if escalate_at is None or d_high == d_low:
            schedules.append(((0, d_low),))
        elif escalate_at == 0:
            schedules.append(((0, d_high),))
        else:
            schedules.append(((0, d_low), (escalate_at, d_high)))
    return CodeAssignment(
        f"d={d_low},{d_high}", profile.num_qubits, tuple(schedules)
    )


def logical_error_rate(
    p: float, distance: int, params: ErrorModelParams = DEFAULT_PARAMS
) -> float:
    """Per-gate logical error probability of a distance-d patch, in [0, 1]."""
    if not (0.0 < p < 1.0):
        raise ValidationError(f"physical error rate must be in (0, 1), got {p}")
    if distance < 3 or distance % 2 == 0:
        raise ValidationError(f"distance must be odd and >= 3, got {distance}")
    rate = params.prefactor * (p / params.threshold) ** ((distance + 1) / 2)
    return min(1.0, float(rate))


def site_error_prob(
    qubits: tuple[int, ...],
    timestep: int,
    assignment: CodeAssignment,
    p: float,
    params: ErrorModelParams = DEFAULT_PARAMS,
) -> float:
    """Probability that at least one patch touched by a gate faults."""
    ok = 1.0
    for q in qubits:
        d = assignment.distance_at(q, timestep)
        ok *= 1.0 - logical_error_rate(p, d, params)
    return 1.0 - ok


def pst_bound(
    profile: SensitivityProfile,
    assignment: CodeAssignment,
    p: float,
    params: ErrorModelParams = DEFAULT_PARAMS,
) -> float:
    """Lower bound on PST under the error model (see module docstring)."""
    if assignment.num_qubits != profile.num_qubits:
        raise AssignmentError("assignment does not match the profile's register")
    faultable = [g for g in profile.gates if g.faultable]
    if not faultable:
        return profile.pst_ideal
    q_g = np.array(
        [
            site_error_prob(g.qubits, g.timestep, assignment, p, params)
            for g in faultable
        ]
    )
    mean_noisy = np.array(
        [g.mean_relative_pst * profile.pst_ideal for g in faultable]
    )
    ok = 1.0 - q_g
    # prod over gates != i, robust to q_g == 1
    prefix = np.concatenate([[1.0], np.cumprod(ok)])
    suffix = np.concatenate([np.cumprod(ok[::-1])[::-1], [1.0]])
    excl = prefix[:-1] * suffix[1:]
    total = profile.pst_ideal * prefix[-1] + float(np.sum(q_g * excl * mean_noisy))
    return float(total)


def latency(
    circuit: Circuit, assignment: CodeAssignment, include_resize: bool = True
) -> int:
    """Total cycles: each gate costs the largest distance among the patches
    it touches at that timestep, plus optional resize costs."""
    return _latency(
        ((op.qubits, op.timestep) for op in circuit.ops), assignment, include_resize
    )


def latency_from_profile(
    profile: SensitivityProfile,
    assignment: CodeAssignment,
    include_resize: bool = True,
) -> int:
    return _latency(
        ((g.qubits, g.timestep) for g in profile.gates), assignment, include_resize
    )


def _latency(gate_locs, assignment: CodeAssignment, include_resize: bool) -> int:
    total = 0
    for qubits, timestep in gate_locs:
        total += max(assignment.distance_at(q, timestep) for q in qubits)
    if include_resize:
        total += assignment.resize_cost()
    return total


def time_to_solution(latency_cycles: int, pst_lower_bound: float) -> float:
    """Expected cycles per success; infinite when success is impossible."""
    if latency_cycles <= 0:
        raise ValidationError("latency must be positive")
    if pst_lower_bound < 0:
        raise ValidationError("pst bound must be nonnegative")
    if pst_lower_bound == 0.0:
        return INFINITE_TTS
    return latency_cycles / pst_lower_bound


@dataclass(frozen=True)
class TtsPoint:
    config: str
    p: float
    latency_cycles: int
    pst_bound: float
    tts: float


def log_p_grid(p_min: float, p_max: float, points: int) -> np.ndarray:
    if not (0.0 < p_min < p_max < 1.0):
        raise ValidationError("need 0 < p_min < p_max < 1")
    if points < 2:
        raise ValidationError("grid needs at least 2 points")
    return np.logspace(np.log10(p_min), np.log10(p_max), points)


def sweep_tts(
    profile: SensitivityProfile,
    assignments: list[CodeAssignment],
    p_grid: np.ndarray,
    params: ErrorModelParams = DEFAULT_PARAMS,
    include_resize: bool = True,
) -> list[TtsPoint]:
    """Time-to-solution of every assignment across the error-rate grid,
    ordered by assignment then by p."""
    points = []
    for assignment in assignments:
        cycles = latency_from_profile(profile, assignment, include_resize)
        for p in p_grid:
            bound = pst_bound(profile, assignment, float(p), params)
            points.append(
                TtsPoint(
                    config=assignment.label,
                    p=float(p),
                    latency_cycles=cycles,
                    pst_bound=bound,
                    tts=time_to_solution(cycles, bound),
                )
            )
    return points


def assignment_to_json(assignment: CodeAssignment) -> dict:
    return {
        "label": assignment.label,
        "num_qubits": assignment.num_qubits,
        "schedules": [
            [[start, d] for start, d in segs] for segs in assignment.schedules
        ],
    }


def assignment_from_json(doc: dict) -> CodeAssignment:
    try:
        return CodeAssignment(
            label=doc["label"],
            num_qubits=int(doc["num_qubits"]),
            schedules=tuple(
                tuple((int(s), int(d)) for s, d in segs)
                for segs in doc["schedules"]
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed assignment document: {exc}") from exc
