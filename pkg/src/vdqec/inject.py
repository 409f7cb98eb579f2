"""Exhaustive logical Pauli fault injection.

A fault site is one gate plus a Pauli error applied right after it to
the qubits the gate touches. Two enumeration modes exist:

  * "mirrored": one shared Pauli per site; a two-qubit gate gets the
    same error on both of its qubits (X.X, Y.Y, Z.Z);
  * "full-depolarizing": every nonidentity Pauli pair on two-qubit
    gates (15 combinations); single-qubit gates get X, Y, Z either way.

Each injected run is simulated exactly and scored by the probability of
still reading the correct bitstring, relative to the noiseless run.
The campaign aggregates records into spatio-temporal cells keyed by
(qubit, timestep): the mean relative PST over every error type at the
gates touching that cell. Cells of non-faultable gates report 1.0 with
zero records.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CampaignError, ValidationError
from .sim import (
    Circuit,
    GateOp,
    StateVector,
    _apply_1q,
    _apply_op,
    circuit_digest,
    output_distribution,
    pst,
    simulate,
    zero_state,
)

MODES = ("mirrored", "full-depolarizing")

_PAULI_MATS = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}


@dataclass(frozen=True)
class FaultSite:
    """Pauli error right after gate ops[gate_index]; paulis[i] acts on
    qubits[i] of that gate ('I' entries are skipped)."""

    gate_index: int
    paulis: tuple[str, ...]

    def __post_init__(self):
        if any(p not in ("I", "X", "Y", "Z") for p in self.paulis):
            raise ValidationError(f"bad Pauli label in {self.paulis}")
        if all(p == "I" for p in self.paulis):
            raise ValidationError("a fault site needs a non-identity Pauli")


@dataclass(frozen=True)
class SensitivityRecord:
    site: FaultSite
    pst_noisy: float
    relative_pst: float


@dataclass(frozen=True)
class GateSummary:
    """Per-gate slice of the campaign, kept so downstream cost models can
    run from the profile alone."""

    gate_index: int
    kind: str
    qubits: tuple[int, ...]
    timestep: int
    faultable: bool
    mean_relative_pst: float
    min_relative_pst: float
    n_records: int


@dataclass(frozen=True)
class CellStats:
    mean_relative_pst: float
    min_relative_pst: float
    n_records: int


@dataclass(frozen=True)
class SensitivityProfile:
    circuit_digest: str
    num_qubits: int
    mode: str
    pst_ideal: float
    records: tuple[SensitivityRecord, ...]
    gates: tuple[GateSummary, ...]

    @property
    def cells(self) -> dict[tuple[int, int], CellStats]:
        """(qubit, timestep) -> aggregate over error types at that cell."""
        out: dict[tuple[int, int], CellStats] = {}
        for g in self.gates:
            stats = CellStats(g.mean_relative_pst, g.min_relative_pst, g.n_records)
            for q in g.qubits:
                out[(q, g.timestep)] = stats
        return out


def enumerate_sites(circuit: Circuit, mode: str = "mirrored") -> list[FaultSite]:
    """Every fault site of the circuit, ordered by gate index then by a
    fixed Pauli order."""
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    sites = []
    for i, op in enumerate(circuit.ops):
        if not op.faultable:
            continue
        if len(op.qubits) == 1:
            sites.extend(FaultSite(i, (p,)) for p in "XYZ")
        elif mode == "mirrored":
            sites.extend(FaultSite(i, (p, p)) for p in "XYZ")
        else:
            for pair in itertools.product("IXYZ", repeat=2):
                if pair != ("I", "I"):
                    sites.append(FaultSite(i, pair))
    return sites


def inject(circuit: Circuit, site: FaultSite) -> Circuit:
    """Copy of the circuit with the site's Pauli gates inserted after the
    faulted gate, at the same timestep."""
    if not (0 <= site.gate_index < len(circuit.ops)):
        raise ValidationError(f"gate_index {site.gate_index} out of range")
    op = circuit.ops[site.gate_index]
    if len(site.paulis) != len(op.qubits):
        raise ValidationError(
            f"site has {len(site.paulis)} Paulis for a {len(op.qubits)}-qubit gate"
        )
    extra = tuple(
        GateOp(p, (q,), (), op.timestep, faultable=False)
        for p, q in zip(site.paulis, op.qubits)
        if p != "I"
    )
    ops = (
        circuit.ops[: site.gate_index + 1]
        + extra
        + circuit.ops[site.gate_index + 1 :]
    )
    return Circuit(circuit.num_qubits, ops, circuit.measured_qubits)


def _site_pst(circuit: Circuit, prefixes, site: FaultSite, correct: str) -> float:
    """PST of one injected run, reusing the cached state just after the
    faulted gate."""
    n = circuit.num_qubits
    amps = prefixes[site.gate_index]
    for p, q in zip(site.paulis, circuit.ops[site.gate_index].qubits):
        if p != "I":
            amps = _apply_1q(amps, n, q, _PAULI_MATS[p])
    for op in circuit.ops[site.gate_index + 1 :]:
        amps = _apply_op(amps, n, op)
    dist = output_distribution(StateVector(n, amps), circuit.measured_qubits)
    return pst(dist, correct)


def run_campaign(
    circuit: Circuit,
    correct_bitstring: str,
    mode: str = "mirrored",
    threads: int = 1,
) -> SensitivityProfile:
    """Simulate every fault site exactly and aggregate the results.

    The outcome is independent of `threads`; workers only split the site
    list and results are merged back in enumeration order.
    """
    threads = max(1, int(threads))
    if not circuit.ops:
        raise CampaignError("circuit has no gates to inject into")
    n = circuit.num_qubits
    prefixes = []
    amps = zero_state(n).amplitudes
    for op in circuit.ops:
        amps = _apply_op(amps, n, op)
        prefixes.append(amps)
    ideal_dist = output_distribution(StateVector(n, amps), circuit.measured_qubits)
    pst_ideal = pst(ideal_dist, correct_bitstring)
    if pst_ideal <= 0.0:
        raise CampaignError(
            "noiseless PST is zero; relative sensitivity is undefined"
        )

    sites = enumerate_sites(circuit, mode)
    if threads == 1 or len(sites) < 2 * threads:
        noisy = [_site_pst(circuit, prefixes, s, correct_bitstring) for s in sites]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            noisy = list(
                pool.map(
                    lambda s: _site_pst(circuit, prefixes, s, correct_bitstring),
                    sites,
                )
            )

    records = tuple(
        SensitivityRecord(site, p_noisy, p_noisy / pst_ideal)
        for site, p_noisy in zip(sites, noisy)
    )

    by_gate: dict[int, list[float]] = {}
    for rec in records:
        by_gate.setdefault(rec.site.gate_index, []).append(rec.relative_pst)
    gates = tuple(
        GateSummary(
            gate_index=i,
            kind=op.kind,
            qubits=op.qubits,
            timestep=op.timestep,
            faultable=op.faultable,
            mean_relative_pst=float(np.mean(by_gate[i])) if i in by_gate else 1.0,
            min_relative_pst=float(np.min(by_gate[i])) if i in by_gate else 1.0,
            n_records=len(by_gate.get(i, ())),
        )
        for i, op in enumerate(circuit.ops)
    )
    return SensitivityProfile(
        circuit_digest=circuit_digest(circuit),
        num_qubits=n,
        mode=mode,
        pst_ideal=pst_ideal,
        records=records,
        gates=gates,
    )


def profile_to_json(profile: SensitivityProfile) -> dict:
    return {
        "circuit_digest": profile.circuit_digest,
        "num_qubits": profile.num_qubits,
        "mode": profile.mode,
        "pst_ideal": profile.pst_ideal,
        "records": [
            [r.site.gate_index, "".join(r.site.paulis), r.pst_noisy, r.relative_pst]
            for r in profile.records
        ],
        "gates": [
            [
                g.gate_index,
                g.kind,
                list(g.qubits),
                g.timestep,
                g.faultable,
                g.mean_relative_pst,
                g.min_relative_pst,
                g.n_records,
            ]
            for g in profile.gates
        ],
    }


def profile_from_json(doc: dict) -> SensitivityProfile:
    try:
        records = tuple(
            SensitivityRecord(FaultSite(int(gi), tuple(paulis)), float(pn), float(rp))
            for gi, paulis, pn, rp in doc["records"]
        )
        gates = tuple(
            GateSummary(
                int(gi), kind, tuple(qubits), int(ts), bool(f),
                float(mean), float(mn), int(nr),
            )
            for gi, kind, qubits, ts, f, mean, mn, nr in doc["gates"]
        )
        return SensitivityProfile(
            circuit_digest=doc["circuit_digest"],
            num_qubits=int(doc["num_qubits"]),
            mode=doc["mode"],
            pst_ideal=float(doc["pst_ideal"]),
            records=records,
            gates=gates,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed profile document: {exc}") from exc


def relative_pst_of_injection(
    circuit: Circuit, site: FaultSite, correct_bitstring: str
) -> float:
    """Reference path through inject() + simulate(); the campaign's cached
    computation must agree with this."""
    ideal = pst(
        output_distribution(simulate(circuit), circuit.measured_qubits),
        correct_bitstring,
    )
    noisy_circ = inject(circuit, site)
    noisy = pst(
        output_distribution(simulate(noisy_circ), noisy_circ.measured_qubits),
        correct_bitstring,
    )
    if ideal <= 0.0:
        raise CampaignError("noiseless PST is zero")
    return noisy / ideal
