import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dotsim import (
    CycleDetectedError,
    EmptyTrajectoryError,
    IndeterminatePolarizationError,
    QcaCellState,
    Scenario,
    SystemParams,
    TanhRise,
    Trajectory,
    UnassignedInputError,
    bit_from_polarization,
    cell_from_trajectory,
    cell_ket,
    eval_circuit,
    integrate,
    majority,
    parse_netlist,
    polarization,
    polarization_from_bit,
)
from dotsim.qca import NetlistFormatError, UnknownNodeError, load_netlist

FIG9 = Path(__file__).resolve().parent.parent / "scenarios" / "fig9_and_or.qca"

AND_TABLE = {(0, 0): 0, (0, 1): 0, (1, 0): 0, (1, 1): 1}
OR_TABLE = {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 1}


def cell(a_t, a_b, eta, tau_d=1.0):
    return QcaCellState(a_t=a_t, a_b=a_b, eta=eta, tau_d=tau_d)


@st.composite
def cell_states(draw):
    mag = draw(st.floats(0.0, 1.0))
    ph_t = draw(st.floats(-math.pi, math.pi))
    ph_b = draw(st.floats(-math.pi, math.pi))
    a_t = mag * complex(math.cos(ph_t), math.sin(ph_t))
    rem = math.sqrt(max(0.0, 1.0 - abs(a_t) ** 2))
    a_b = rem * complex(math.cos(ph_b), math.sin(ph_b))
    eta = draw(st.one_of(st.sampled_from([0.0, 1.0]), st.floats(0.0, 1.0)))
    tau_d = draw(st.floats(0.05, 20.0))
    return cell(a_t, a_b, eta, tau_d)


# ------------------------------------------------------------------ the cell

def test_cell_state_validation():
    with pytest.raises(ValueError):
        cell(1.0, 0.5, 0.5)           # not normalized
    with pytest.raises(ValueError):
        cell(1.0, 0.0, 1.5)           # eta out of range
    with pytest.raises(ValueError):
        cell(1.0, 0.0, 0.5, tau_d=0)  # decay constant must be positive


def test_decoupled_cell_factorizes():
    c = cell(0.6, 0.8j, eta=0.0)
    ket = cell_ket(c)
    # (a_t|T> + a_b|B>) x (|T> + |B>)/sqrt(2)
    s = 1.0 / math.sqrt(2.0)
    for got, want in zip((ket.tt, ket.tb, ket.bt, ket.bb),
                         (0.6 * s, 0.6 * s, 0.8j * s, 0.8j * s)):
        assert got == pytest.approx(want, abs=1e-12)


def test_maximally_coupled_cell_is_diagonal():
    c = cell(0.6, 0.8j, eta=1.0)
    ket = cell_ket(c)
    assert ket.tt == 0.0 and ket.bb == 0.0  # exactly, w = 0
    assert ket.tb == 0.6
    assert ket.bt == 0.8j


def test_cell_ket_intermediate_weight():
    # w = exp(-1*0.5/0.5)/2 = e^-1/2
    ket = cell_ket(cell(1.0, 0.0, eta=0.5, tau_d=1.0))
    w = 0.18393972058572117
    assert abs(ket.tt) ** 2 == pytest.approx(w, abs=1e-15)
    assert abs(ket.tb) ** 2 == pytest.approx(1.0 - w, abs=1e-15)
    assert ket.bt == 0.0 and ket.bb == 0.0


@given(c=cell_states())
def test_cell_ket_normalized_for_any_coupling(c):
    assert abs(cell_ket(c).norm() - 1.0) <= 1e-9


# -------------------------------------------------------------- polarization

def test_polarization_endpoints():
    assert polarization(cell(1.0, 0.0, eta=1.0)) == 1.0
    assert polarization(cell(0.6, 0.8, eta=0.0)) == 0.0


def test_polarization_intermediate_value():
    # (1 - e^-1) at eta = 0.5, tau_d = 1, top fully occupied
    assert polarization(cell(1.0, 0.0, eta=0.5, tau_d=1.0)) == pytest.approx(
        0.6321205588285577, abs=1e-15)


@given(c=cell_states())
def test_polarization_bounded_by_population_imbalance(c):
    imbalance = abs(abs(c.a_t) ** 2 - abs(c.a_b) ** 2)
    assert abs(polarization(c)) <= imbalance + 1e-15
    assert abs(polarization(c)) <= 1.0 + 1e-15


def test_polarization_monotone_in_coupling():
    etas = np.linspace(0.0, 1.0, 21)
    values = [polarization(cell(0.9, math.sqrt(1 - 0.81), eta=e)) for e in etas]
    assert all(b >= a for a, b in zip(values, values[1:]))


# ------------------------------------------------------- cell_from_trajectory

def _traj_ending(a_l, a_r):
    one = np.array([0.0, 1.0])
    return Trajectory(times=one, p_left=one, p_right=one, alpha=one, phi=one,
                      a_l=np.array([1.0 + 0j, a_l]), a_r=np.array([0j, a_r]),
                      norm_drift=0.0)


def test_cell_from_trajectory_maps_right_to_top():
    c = cell_from_trajectory(_traj_ending(0.0, 1.0), eta=1.0, tau_d=1.0)
    assert abs(c.a_t) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_cell_from_trajectory_renormalizes_drifted_state():
    c = cell_from_trajectory(_traj_ending(1e-9, 1.0), eta=1.0, tau_d=1.0)
    assert abs(abs(c.a_t) ** 2 + abs(c.a_b) ** 2 - 1.0) < 1e-12


def test_cell_from_balanced_trajectory_is_unreadable():
    s = 1.0 / math.sqrt(2.0)
    c = cell_from_trajectory(_traj_ending(s, s), eta=1.0, tau_d=1.0)
    assert polarization(c) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(IndeterminatePolarizationError):
        bit_from_polarization(polarization(c))


def test_cell_from_empty_trajectory():
    empty = np.array([])
    traj = Trajectory(times=empty, p_left=empty, p_right=empty, alpha=empty,
                      phi=empty, a_l=empty.astype(complex),
                      a_r=empty.astype(complex), norm_drift=0.0)
    with pytest.raises(EmptyTrajectoryError):
        cell_from_trajectory(traj, eta=1.0, tau_d=1.0)


def test_cell_from_transfer_run_ends_in_bottom_dot():
    # tanh pulse moves the electron right -> left; bottom mirrors left
    p = SystemParams(k=1.0, omega_coulomb=0.0, rabi_ratio=2.4)
    traj = integrate(Scenario(params=p, envelope=TanhRise(2.0), t_end=30.0,
                              initial="right"))
    c = cell_from_trajectory(traj, eta=1.0, tau_d=1.0)
    assert abs(c.a_b) ** 2 >= 0.9


# -------------------------------------------------------------- bit readout

@pytest.mark.parametrize("p,bit", [(1.0, 0), (0.051, 0), (-0.7, 1), (-1.0, 1)])
def test_bit_from_polarization(p, bit):
    assert bit_from_polarization(p) == bit


@pytest.mark.parametrize("p", [0.0, 0.05, -0.05, 0.01])
def test_bit_from_polarization_dead_zone(p):
    with pytest.raises(IndeterminatePolarizationError):
        bit_from_polarization(p)


def test_polarization_from_bit():
    assert polarization_from_bit(0) == 1.0
    assert polarization_from_bit(1) == -1.0
    with pytest.raises(ValueError):
        polarization_from_bit(2)


# ------------------------------------------------------------------ majority

def test_majority_votes():
    assert majority(1.0, 1.0, -1.0) == 1.0          # bits 0,0,1 -> 0
    assert bit_from_polarization(majority(-1.0, 1.0, 1.0)) == 0   # AND(1,0)
    assert bit_from_polarization(majority(-1.0, 1.0, -1.0)) == 1  # OR(1,0)


def test_majority_permutation_invariant():
    from itertools import permutations, product
    for bits in product((0, 1), repeat=3):
        pols = tuple(polarization_from_bit(b) for b in bits)
        results = {majority(*perm) for perm in permutations(pols)}
        assert len(results) == 1


def test_majority_fixed_input_gives_and_or():
    for a in (0, 1):
        for b in (0, 1):
            pa, pb = polarization_from_bit(a), polarization_from_bit(b)
            assert bit_from_polarization(majority(pa, pb, polarization_from_bit(0))) == (a & b)
            assert bit_from_polarization(majority(pa, pb, polarization_from_bit(1))) == (a | b)


def test_majority_propagates_indeterminate():
    with pytest.raises(IndeterminatePolarizationError):
        majority(1.0, 0.0, -1.0)


# ------------------------------------------------------------------- netlist

def test_parse_shipped_circuit():
    net = load_netlist(FIG9)
    assert net.input_ids == ("a", "b", "c")
    assert net.probe_ids == ("out",)
    assert net.nodes["m1"].inputs == ("a", "b", "c")


def test_parse_comments_and_fixed_nodes():
    net = parse_netlist("""
        # header comment
        input x
        fixed one 1   # trailing comment
        maj m x x one
        probe y m
    """)
    assert net.nodes["one"].bit == 1
    assert eval_circuit(net, bits={"x": 0}) == {"y": 0}
    assert eval_circuit(net, bits={"x": 1}) == {"y": 1}


@pytest.mark.parametrize("text", [
    "gate g a b",                       # unknown kind
    "maj m a b",                        # wrong arity
    "fixed f 2",                        # bad bit
    "input a\ninput a",                 # duplicate id
    "input a\nmaj m a a a\nprobe p m\nmaj q p p p",  # probe feeding a gate
])
def test_parse_rejects_bad_lines(text):
    with pytest.raises(NetlistFormatError):
        parse_netlist(text)


def test_parse_rejects_unknown_reference():
    with pytest.raises(UnknownNodeError):
        parse_netlist("input a\nmaj m a a ghost")


def test_parse_rejects_cycle():
    with pytest.raises(CycleDetectedError):
        parse_netlist("input a\nmaj m1 a m2 a\nmaj m2 a m1 a")


# -------------------------------------------------------------- eval_circuit

def test_circuit_and_or_with_bit_control():
    net = load_netlist(FIG9)
    for (a, b), want in AND_TABLE.items():
        assert eval_circuit(net, bits={"a": a, "b": b, "c": 0}) == {"out": want}
    for (a, b), want in OR_TABLE.items():
        assert eval_circuit(net, bits={"a": a, "b": b, "c": 1}) == {"out": want}


def test_circuit_with_coupled_control_cell():
    net = load_netlist(FIG9)
    control = cell(1.0, 0.0, eta=1.0)  # top occupied: P = +1, bit 0 -> AND
    for (a, b), want in AND_TABLE.items():
        out = eval_circuit(net, bits={"a": a, "b": b}, cells={"c": control})
        assert out == {"out": want}


def test_circuit_decoupled_control_fails_loudly():
    net = load_netlist(FIG9)
    control = cell(1.0, 0.0, eta=0.0)  # P = 0 regardless of amplitudes
    with pytest.raises(IndeterminatePolarizationError):
        eval_circuit(net, bits={"a": 1, "b": 1}, cells={"c": control})


def test_circuit_unassigned_input():
    net = load_netlist(FIG9)
    with pytest.raises(UnassignedInputError):
        eval_circuit(net, bits={"a": 1, "b": 0})


def test_circuit_rejects_bad_assignments():
    net = load_netlist(FIG9)
    with pytest.raises(UnknownNodeError):
        eval_circuit(net, bits={"a": 1, "b": 0, "m1": 1})
    with pytest.raises(Exception):
        eval_circuit(net, bits={"a": 1, "b": 0, "c": 0},
                     cells={"c": cell(1.0, 0.0, eta=1.0)})
