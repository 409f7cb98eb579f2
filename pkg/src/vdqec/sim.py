"""Exact statevector simulation of small gate circuits.

Conventions:
  * qubit 0 is the least significant bit of a basis-state index;
  * Rz(theta) is the phase rotation diag(1, e^{i theta}), so S = Rz(pi/2)
    and T = Rz(pi/4) hold exactly (no global phase bookkeeping needed);
  * ControlledPhase(theta) is diag(1, 1, 1, e^{i theta}) with
    qubits = (control, target), although the gate is symmetric;
  * output distributions are computed by exact marginalization, never by
    sampling, so repeated runs are bit-identical.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidCircuitError, ValidationError

SQRT2 = np.sqrt(2.0)

_GATE_1Q = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0, -1.0]).astype(complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / SQRT2,
    "S": np.diag([1.0, 1j]).astype(complex),
    "Sdg": np.diag([1.0, -1j]).astype(complex),
    "T": np.diag([1.0, np.exp(1j * np.pi / 4)]).astype(complex),
    "Tdg": np.diag([1.0, np.exp(-1j * np.pi / 4)]).astype(complex),
}

_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

# kind -> (arity, number of parameters)
GATE_SIGNATURES = {
    "X": (1, 0),
    "Y": (1, 0),
    "Z": (1, 0),
    "H": (1, 0),
    "S": (1, 0),
    "Sdg": (1, 0),
    "T": (1, 0),
    "Tdg": (1, 0),
    "Rz": (1, 1),
    "ControlledPhase": (2, 1),
    "CNOT": (2, 0),
}

MAX_QUBITS = 12


def rz_matrix(theta: float) -> np.ndarray:
    """Phase rotation diag(1, e^{i theta})."""
    return np.diag([1.0, np.exp(1j * float(theta))]).astype(complex)


def controlled_phase_matrix(theta: float) -> np.ndarray:
    return np.diag([1.0, 1.0, 1.0, np.exp(1j * float(theta))]).astype(complex)


def gate_matrix(kind: str, params: tuple[float, ...] = ()) -> np.ndarray:
    """Dense matrix (2x2 or 4x4) for a gate kind."""
    if kind in _GATE_1Q:
        return _GATE_1Q[kind]
    if kind == "Rz":
        return rz_matrix(params[0])
    if kind == "ControlledPhase":
        return controlled_phase_matrix(params[0])
    if kind == "CNOT":
        return _CNOT
    raise InvalidCircuitError(f"unknown gate kind {kind!r}")


@dataclass(frozen=True)
class GateOp:
    """One gate application at a discrete timestep.

    faultable marks whether the fault injector may place a Pauli error
    after this gate; state preparation gates are typically not faultable.
    """

    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    timestep: int = 0
    faultable: bool = True

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.kind not in GATE_SIGNATURES:
            raise InvalidCircuitError(f"unknown gate kind {self.kind!r}")
        arity, nparams = GATE_SIGNATURES[self.kind]
        if len(self.qubits) != arity:
            raise InvalidCircuitError(
                f"{self.kind} expects {arity} qubit(s), got {self.qubits}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise InvalidCircuitError(f"{self.kind} on repeated qubit {self.qubits}")
        if len(self.params) != nparams:
            raise InvalidCircuitError(
                f"{self.kind} expects {nparams} parameter(s), got {self.params}"
            )


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list on num_qubits qubits plus a measurement spec.

    measured_qubits are read out most significant bit first: the output
    bitstring character i is the value of measured_qubits[i].
    """

    num_qubits: int
    ops: tuple[GateOp, ...]
    measured_qubits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        object.__setattr__(
            self, "measured_qubits", tuple(int(q) for q in self.measured_qubits)
        )
        n = self.num_qubits
        if not (1 <= n <= MAX_QUBITS):
            raise InvalidCircuitError(
                f"num_qubits must be in [1, {MAX_QUBITS}], got {n}"
            )
        prev_t = None
        for op in self.ops:
            if any(not (0 <= q < n) for q in op.qubits):
                raise InvalidCircuitError(
                    f"{op.kind} touches qubit outside [0, {n}): {op.qubits}"
                )
            if prev_t is not None and op.timestep < prev_t:
                raise InvalidCircuitError("timesteps must be nondecreasing")
            prev_t = op.timestep
        if not self.measured_qubits:
            raise InvalidCircuitError("measured_qubits must be nonempty")
        if len(set(self.measured_qubits)) != len(self.measured_qubits):
            raise InvalidCircuitError("measured_qubits must be distinct")
        if any(not (0 <= q < n) for q in self.measured_qubits):
            raise InvalidCircuitError("measured qubit outside register")


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state on num_qubits qubits; treated as immutable."""

    num_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (2**self.num_qubits,):
            raise ValidationError(
                f"expected {2**self.num_qubits} amplitudes, got {amps.shape}"
            )
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)


def zero_state(num_qubits: int) -> StateVector:
    """|0...0> on num_qubits qubits."""
    if not (1 <= num_qubits <= MAX_QUBITS):
        raise ValidationError(f"num_qubits must be in [1, {MAX_QUBITS}]")
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def _apply_1q(amps: np.ndarray, n: int, q: int, mat: np.ndarray) -> np.ndarray:
    psi = amps.reshape([2] * n)
    ax = n - 1 - q
    psi = np.moveaxis(psi, ax, 0)
    psi = np.tensordot(mat, psi, axes=([1], [0]))
    return np.moveaxis(psi, 0, ax).reshape(-1)


def _apply_2q(amps: np.ndarray, n: int, q1: int, q2: int, mat: np.ndarray) -> np.ndarray:
    psi = amps.reshape([2] * n)
    a1, a2 = n - 1 - q1, n - 1 - q2
    psi = np.moveaxis(psi, (a1, a2), (0, 1))
    psi = np.tensordot(mat.reshape(2, 2, 2, 2), psi, axes=([2, 3], [0, 1]))
    return np.moveaxis(psi, (0, 1), (a1, a2)).reshape(-1)


def _apply_op(amps: np.ndarray, n: int, op: GateOp) -> np.ndarray:
    mat = gate_matrix(op.kind, op.params)
    if len(op.qubits) == 1:
        return _apply_1q(amps, n, op.qubits[0], mat)
    return _apply_2q(amps, n, op.qubits[0], op.qubits[1], mat)


def apply_gate(state: StateVector, op: GateOp) -> StateVector:
    """Apply a single gate, returning a new state."""
    n = state.num_qubits
    if any(q >= n for q in op.qubits):
        raise InvalidCircuitError(f"{op.kind} touches qubit outside register")
    return StateVector(n, _apply_op(state.amplitudes, n, op))


def simulate(circuit: Circuit, initial: StateVector | None = None) -> StateVector:
    """Run every gate in order starting from |0...0> (or `initial`)."""
    if initial is None:
        initial = zero_state(circuit.num_qubits)
    elif initial.num_qubits != circuit.num_qubits:
        raise ValidationError("initial state size does not match circuit")
    amps = initial.amplitudes
    n = circuit.num_qubits
    for op in circuit.ops:
        amps = _apply_op(amps, n, op)
    return StateVector(n, amps)


def output_distribution(
    state: StateVector, measured_qubits: tuple[int, ...]
) -> dict[str, float]:
    """Exact measurement distribution over the listed qubits (MSB first).

    Unmeasured qubits are marginalized out. Outcomes with probability
    below 1e-15 are dropped.
    """
    n = state.num_qubits
    mq = tuple(int(q) for q in measured_qubits)
    if not mq or len(set(mq)) != len(mq) or any(not (0 <= q < n) for q in mq):
        raise ValidationError(f"bad measured_qubits {measured_qubits}")
    probs = np.abs(state.amplitudes) ** 2
    idx = np.arange(probs.size)
    keys = np.zeros(probs.size, dtype=np.int64)
    for q in mq:
        keys = (keys << 1) | ((idx >> q) & 1)
    acc = np.zeros(2 ** len(mq))
    np.add.at(acc, keys, probs)
    width = len(mq)
    return {
        format(k, f"0{width}b"): float(acc[k])
        for k in range(acc.size)
        if acc[k] > 1e-15
    }


def pst(distribution: dict[str, float], correct_bitstring: str) -> float:
    """Probability of successful trial: mass on the correct outcome."""
    if not distribution:
        raise ValidationError("empty distribution")
    width = len(next(iter(distribution)))
    if len(correct_bitstring) != width or set(correct_bitstring) - {"0", "1"}:
        raise ValidationError(
            f"bitstring {correct_bitstring!r} does not match outcome width {width}"
        )
    return float(distribution.get(correct_bitstring, 0.0))


def circuit_to_json(circuit: Circuit) -> dict:
    return {
        "num_qubits": circuit.num_qubits,
        "ops": [
            {
                "kind": op.kind,
                "params": list(op.params),
                "qubits": list(op.qubits),
                "timestep": op.timestep,
                "faultable": op.faultable,
            }
            for op in circuit.ops
        ],
        "measured_qubits": list(circuit.measured_qubits),
    }


def circuit_from_json(doc: dict) -> Circuit:
    try:
        ops = tuple(
            GateOp(
                kind=o["kind"],
                qubits=tuple(o["qubits"]),
                params=tuple(o.get("params") or ()),
                timestep=int(o.get("timestep", i)),
                faultable=bool(o.get("faultable", True)),
            )
            for i, o in enumerate(doc["ops"])
        )
        return Circuit(
            num_qubits=int(doc["num_qubits"]),
            ops=ops,
            measured_qubits=tuple(doc["measured_qubits"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed circuit document: {exc}") from exc


def circuit_digest(circuit: Circuit) -> str:
    """Stable sha256 over the canonical JSON form."""
    blob = json.dumps(circuit_to_json(circuit), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def with_faultable(circuit: Circuit, faultable: bool) -> Circuit:
    """Copy of the circuit with every op's faultable flag overridden."""
    return replace(
        circuit, ops=tuple(replace(op, faultable=faultable) for op in circuit.ops)
    )
