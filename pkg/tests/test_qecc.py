import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import exact_success_and_multi_mass
from vdqec.errors import AssignmentError, ValidationError
from vdqec.inject import GateSummary, SensitivityProfile, run_campaign
from vdqec.qecc import (
    CodeAssignment,
    ErrorModelParams,
    assign_two_distance,
    assignment_from_json,
    assignment_to_json,
    latency,
    latency_from_profile,
    log_p_grid,
    logical_error_rate,
    pst_bound,
    site_error_prob,
    sweep_tts,
    time_to_solution,
    uniform_assignment,
)
from vdqec.qpe import build_qpe
from vdqec.sim import Circuit, GateOp

P_TH = 0.0057


def test_rate_at_threshold_is_prefactor():
    for d in (3, 5, 7):
        assert logical_error_rate(P_TH, d) == pytest.approx(0.03, abs=1e-12)


def test_rate_tenth_of_threshold():
    assert logical_error_rate(0.00057, 3) == pytest.approx(3.0e-4, abs=1e-12)


def test_rate_clamps_to_one():
    assert logical_error_rate(4 * P_TH, 3) == pytest.approx(min(1.0, 0.03 * 16))
    assert logical_error_rate(0.9, 3) == 1.0


def test_rate_validates_inputs():
    with pytest.raises(ValidationError):
        logical_error_rate(0.0, 3)
    with pytest.raises(ValidationError):
        logical_error_rate(0.001, 4)
    with pytest.raises(ValidationError):
        logical_error_rate(0.001, 1)


@settings(max_examples=60, deadline=None)
@given(
    p=st.floats(1e-6, 0.9, allow_nan=False),
    d=st.sampled_from([3, 5, 7, 9]),
)
def test_rate_monotone_in_p(p, d):
    assert logical_error_rate(p, d) <= logical_error_rate(min(0.99, p * 1.5), d)


def test_rate_monotone_below_threshold_grid():
    for p in np.logspace(-6, np.log10(P_TH * 0.999), 100):
        rates = [logical_error_rate(float(p), d) for d in (3, 5, 7, 9)]
        assert rates == sorted(rates, reverse=True)


def test_site_error_prob_examples():
    a = uniform_assignment(2, 3)
    assert site_error_prob((0,), 0, a, P_TH) == pytest.approx(0.03, abs=1e-12)
    q = logical_error_rate(P_TH, 3)
    assert site_error_prob((0, 1), 0, a, P_TH) == pytest.approx(
        1 - (1 - q) ** 2, abs=1e-12
    )
    assert site_error_prob((0, 1), 0, a, 1e-9) == pytest.approx(0.0, abs=1e-9)


def test_assignment_validation():
    with pytest.raises(AssignmentError):
        CodeAssignment("bad", 1, (((0, 4),),))
    with pytest.raises(AssignmentError):
        CodeAssignment("bad", 1, (((1, 3),),))
    with pytest.raises(AssignmentError):
        CodeAssignment("bad", 1, (((0, 5), (4, 3)),))
    with pytest.raises(AssignmentError):
        CodeAssignment("bad", 2, (((0, 3),),))


def test_distance_schedule_lookup():
    a = CodeAssignment("d=3,5", 1, (((0, 3), (10, 5)),))
    assert a.distance_at(0, 0) == 3
    assert a.distance_at(0, 9) == 3
    assert a.distance_at(0, 10) == 5
    assert a.distance_at(0, 99) == 5
    with pytest.raises(AssignmentError):
        a.distance_at(0, -1)
    with pytest.raises(AssignmentError):
        a.distance_at(1, 0)


def test_latency_uniform_examples():
    ops = tuple(GateOp("H", (0,), (), t) for t in range(10))
    c = Circuit(1, ops, (0,))
    assert latency(c, uniform_assignment(1, 3)) == 30
    assert latency(c, uniform_assignment(1, 5)) == 50


def test_latency_max_rule_and_resize():
    a = CodeAssignment("mix", 2, (((0, 3),), ((0, 3), (1, 5))))
    c = Circuit(2, (GateOp("CNOT", (0, 1), (), 1),), (0,))
    # gate spans d=3 and d=5 -> 5 cycles, plus one 3->5 resize -> 5 cycles
    assert latency(c, a, include_resize=True) == 10
    assert latency(c, a, include_resize=False) == 5


def test_time_to_solution():
    assert time_to_solution(100, 0.5) == 200
    assert time_to_solution(100, 1.0) == 100
    assert time_to_solution(100, 0.0) == math.inf
    with pytest.raises(ValidationError):
        time_to_solution(0, 0.5)


def _profile():
    circuit, correct = build_qpe()
    return circuit, run_campaign(circuit, correct, "mirrored")


def test_assign_two_distance_escalates_monotonically():
    _, profile = _profile()
    a = assign_two_distance(profile, 3, 5, 0.9)
    assert a.label == "d=3,5"
    for q in range(profile.num_qubits):
        distances = [a.distance_at(q, t) for t in range(30)]
        assert distances == sorted(distances)


def test_assign_all_quiet_cells_stays_low():
    _, profile = _profile()
    a = assign_two_distance(profile, 3, 5, tau=0.0)
    assert a.schedules == uniform_assignment(profile.num_qubits, 3).schedules


def test_assign_target_qubit_never_escalates():
    # qubit 5 idles after prep, so its cells stay at 1.0
    _, profile = _profile()
    a = assign_two_distance(profile, 3, 5, 0.9)
    assert a.schedules[5] == ((0, 3),)


def test_pst_bound_approaches_ideal_at_low_p():
    _, profile = _profile()
    a = uniform_assignment(profile.num_qubits, 3)
    assert pst_bound(profile, a, 1e-12) == pytest.approx(profile.pst_ideal, abs=1e-6)


def test_pst_bound_certain_harmless_error():
    # one faultable gate whose relative PST is exactly 1, with q = 1
    gates = (GateSummary(0, "H", (0,), 0, True, 1.0, 1.0, 3),)
    profile = SensitivityProfile("digest", 1, "mirrored", 0.75, (), gates)
    a = uniform_assignment(1, 3)
    p_huge = 0.5  # P_L clamps to 1 here
    assert site_error_prob((0,), 0, a, p_huge) == 1.0
    assert pst_bound(profile, a, p_huge) == pytest.approx(0.75, abs=1e-12)


def test_pst_bound_monotone_in_p():
    _, profile = _profile()
    a = uniform_assignment(profile.num_qubits, 3)
    values = [pst_bound(profile, a, float(p)) for p in np.logspace(-5, -2, 30)]
    assert all(b <= a_ + 1e-12 for a_, b in zip(values, values[1:]))


def test_pst_bound_is_true_lower_bound_on_toy_circuit():
    ops = (
        GateOp("H", (0,), (), 0, faultable=False),
        GateOp("CNOT", (0, 1), (), 1),
        GateOp("T", (1,), (), 2),
        GateOp("H", (1,), (), 3),
        GateOp("CNOT", (1, 0), (), 4),
    )
    c = Circuit(2, ops, (0, 1))
    correct = "00"
    profile = run_campaign(c, correct, "mirrored")
    a = uniform_assignment(2, 3)
    params = ErrorModelParams()
    for p in (0.0005, 0.002, 0.005):
        bound = pst_bound(profile, a, p, params)
        exact, multi_mass = exact_success_and_multi_mass(c, correct, a, p, params)
        assert bound <= exact + 1e-10
        assert exact - bound <= multi_mass + 1e-10


def test_latency_sandwich():
    circuit, profile = _profile()
    two = assign_two_distance(profile, 3, 5, 0.9)
    low = latency(circuit, uniform_assignment(6, 3))
    high = latency(circuit, uniform_assignment(6, 5))
    mid = latency(circuit, two)
    assert low <= mid <= high + two.resize_cost()
    assert latency_from_profile(profile, two) == mid


def test_sweep_shape_and_order():
    _, profile = _profile()
    assignments = [uniform_assignment(6, 3), assign_two_distance(profile, 3, 5)]
    grid = log_p_grid(1e-5, 1e-2, 7)
    points = sweep_tts(profile, assignments, grid)
    assert len(points) == 14
    assert [pt.config for pt in points] == ["d=3"] * 7 + ["d=3,5"] * 7
    for chunk in (points[:7], points[7:]):
        assert [pt.p for pt in chunk] == sorted(pt.p for pt in chunk)
        for pt in chunk:
            assert pt.tts >= pt.latency_cycles


def test_sweep_single_point():
    _, profile = _profile()
    points = sweep_tts(profile, [uniform_assignment(6, 3)], np.array([1e-4]))
    assert len(points) == 1


def test_pst_bound_ordering_below_threshold():
    # escalating every distance can only help while p is below threshold
    _, profile = _profile()
    ladder = [
        uniform_assignment(6, 3),
        assign_two_distance(profile, 3, 5),
        uniform_assignment(6, 5),
        assign_two_distance(profile, 5, 7),
        uniform_assignment(6, 7),
    ]
    for p in np.logspace(-5, np.log10(P_TH * 0.999), 25):
        bounds = [pst_bound(profile, a, float(p)) for a in ladder]
        assert all(x <= y + 1e-12 for x, y in zip(bounds, bounds[1:])), p


def test_assignment_json_roundtrip():
    _, profile = _profile()
    a = assign_two_distance(profile, 3, 5, 0.9)
    doc = json.loads(json.dumps(assignment_to_json(a)))
    assert assignment_from_json(doc) == a


def test_params_validation():
    with pytest.raises(ValidationError):
        ErrorModelParams(prefactor=0.0)
    with pytest.raises(ValidationError):
        log_p_grid(1e-2, 1e-5, 10)
