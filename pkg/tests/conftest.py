import numpy as np
import pytest

from vdqec.sim import Circuit, gate_matrix


def embed_gate(num_qubits, qubits, mat):
    """Full 2^n x 2^n matrix of a 1- or 2-qubit gate, built by explicit
    basis-index bookkeeping (independent of the simulator's tensor path).

    qubits[0] is the most significant bit of the local gate index, and
    qubit 0 is the least significant bit of the global index.
    """
    n = num_qubits
    k = len(qubits)
    full = np.zeros((2**n, 2**n), dtype=complex)
    for col in range(2**n):
        local_in = 0
        for i, q in enumerate(qubits):
            local_in |= ((col >> q) & 1) << (k - 1 - i)
        for local_out in range(2**k):
            amp = mat[local_out, local_in]
            if amp == 0:
                continue
            row = col
            for i, q in enumerate(qubits):
                bit = (local_out >> (k - 1 - i)) & 1
                row = (row & ~(1 << q)) | (bit << q)
            full[row, col] += amp
    return full


def dense_circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Oracle: multiply out every gate as a dense 2^n x 2^n matrix."""
    u = np.eye(2**circuit.num_qubits, dtype=complex)
    for op in circuit.ops:
        u = embed_gate(circuit.num_qubits, op.qubits, gate_matrix(op.kind, op.params)) @ u
    return u


def haar_random_unitary(rng, dim=2):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q @ np.diag(np.diag(r) / np.abs(np.diag(r)))


def exact_success_and_multi_mass(circuit, correct, assignment, p, params):
    """Oracle for the PST lower bound: walk EVERY error pattern (each
    faultable gate independently suffers no error, or one of the mirrored
    Pauli types with probability q_g/3 each), simulating each branch
    exactly. Returns (exact success probability, total probability mass
    of patterns with two or more errors)."""
    from vdqec.qecc import site_error_prob
    from vdqec.sim import StateVector, output_distribution, pst, zero_state

    n = circuit.num_qubits
    ops = circuit.ops

    def score(amps):
        d = output_distribution(StateVector(n, amps), circuit.measured_qubits)
        return pst(d, correct)

    def go(i, amps, weight, n_errors):
        if weight == 0.0:
            return 0.0, 0.0
        if i == len(ops):
            return weight * score(amps), (weight if n_errors >= 2 else 0.0)
        op = ops[i]
        after = embed_gate(n, op.qubits, gate_matrix(op.kind, op.params)) @ amps
        if not op.faultable:
            return go(i + 1, after, weight, n_errors)
        q_g = site_error_prob(op.qubits, op.timestep, assignment, p, params)
        success, multi = go(i + 1, after, weight * (1.0 - q_g), n_errors)
        for pauli in "XYZ":
            corrupted = after
            for q in op.qubits:
                corrupted = embed_gate(n, (q,), gate_matrix(pauli)) @ corrupted
            s2, m2 = go(i + 1, corrupted, weight * q_g / 3.0, n_errors + 1)
            success += s2
            multi += m2
        return success, multi

    return go(0, zero_state(n).amplitudes, 1.0, 0)


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
