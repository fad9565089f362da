"""Quantum-dot cellular automata layer: cell model, polarization readout,
majority logic, and a netlist evaluator.

A cell is two vertical double-dot pairs sharing two electrons.  The left
pair is the externally driven one: its top amplitude ``a_t`` mirrors the
right-dot amplitude of the drive simulation and its bottom amplitude ``a_b``
the left-dot one (the identification that makes the decoupled limit
factorize).  The right pair idles at equal tunneling probability.  A
phenomenological coupling eta in [0, 1] with decay constant tau_d sets the
diagonal-locking weight

    w = exp(-tau_d * eta / (1 - eta)) / 2,

continuously extended to w = 0 at eta = 1.  The two-electron state over the
basis (|TT>, |TB>, |BT>, |BB>) is

    sqrt(w)*a_t, sqrt(1-w)*a_t, sqrt(1-w)*a_b, sqrt(w)*a_b,

which is normalized for every eta.  At eta = 0 (w = 1/2) the pairs
factorize as (a_t|T> + a_b|B>) x (|T> + |B>)/sqrt(2); at eta = 1 only the
diagonal configurations |TB>, |BT> survive.  The cell polarization

    P = (|a_t|^2 - |a_b|^2) * (1 - 2*w)

ranges over [-1, 1]; P = +1 reads as bit 0 and P = -1 as bit 1, so a
decoupled cell (P = 0) has no classical value at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from pathlib import Path
from typing import Mapping

from .integrator import Trajectory

#: |P| at or below this has no classical reading.
P_THRESHOLD = 0.05

NORM_TOL = 1e-9


class EmptyTrajectoryError(ValueError):
    """A cell was requested from a trajectory with no samples."""


class IndeterminatePolarizationError(ValueError):
    """Polarization too close to zero to read as a bit."""


class NetlistError(ValueError):
    """Base for netlist parsing and evaluation failures."""


class NetlistFormatError(NetlistError):
    """A netlist line does not match the grammar."""


class UnknownNodeError(NetlistError):
    """An edge references a node id that was never declared."""


class CycleDetectedError(NetlistError):
    """The netlist graph is not acyclic."""


class UnassignedInputError(NetlistError):
    """An input cell was given neither a bit nor a cell state."""


@dataclass(frozen=True)
class QcaCellState:
    """One QCA cell: driven-pair amplitudes plus coupling parameters."""

    a_t: complex
    a_b: complex
    eta: float
    tau_d: float

    def __post_init__(self):
        norm = math.hypot(abs(self.a_t), abs(self.a_b))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"cell amplitudes must be normalized, |norm-1|={abs(norm - 1.0):.3g}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")
        if not (math.isfinite(self.tau_d) and self.tau_d > 0.0):
            raise ValueError("tau_d must be > 0")


@dataclass(frozen=True)
class CellKet:
    """Two-electron coefficients over (|TT>, |TB>, |BT>, |BB>)."""

    tt: complex
    tb: complex
    bt: complex
    bb: complex

    def norm(self) -> float:
        return math.sqrt(abs(self.tt) ** 2 + abs(self.tb) ** 2
                         + abs(self.bt) ** 2 + abs(self.bb) ** 2)


def _lock_weight(eta: float, tau_d: float) -> float:
    if eta >= 1.0:
        return 0.0
    return 0.5 * math.exp(-tau_d * eta / (1.0 - eta))


def cell_ket(cell: QcaCellState) -> CellKet:
    """Expand a cell into its two-electron basis ket (unit norm for any eta)."""
    w = _lock_weight(cell.eta, cell.tau_d)
    sw = math.sqrt(w)
    su = math.sqrt(1.0 - w)
    return CellKet(sw * cell.a_t, su * cell.a_t, su * cell.a_b, sw * cell.a_b)


def polarization(cell: QcaCellState) -> float:
    """Cell polarization P in [-1, 1].

    P vanishes identically for a decoupled cell (eta = 0) and reaches
    |a_t|^2 - |a_b|^2 exactly at maximal coupling (eta = 1); in between it is
    monotone in eta for fixed amplitudes.
    """
    w = _lock_weight(cell.eta, cell.tau_d)
    return (abs(cell.a_t) ** 2 - abs(cell.a_b) ** 2) * (1.0 - 2.0 * w)


def cell_from_trajectory(traj: Trajectory, eta: float, tau_d: float) -> QcaCellState:
    """Prepare a cell from the end state of a drive simulation.

    Maps the final right-dot amplitude to the top and the left-dot amplitude
    to the bottom.  The pair is renormalized: amplitude-formulation runs
    carry harmless integration drift (~1e-8) that the cell invariant (1e-9)
    would otherwise reject.
    """
    if len(traj) == 0:
        raise EmptyTrajectoryError("trajectory holds no samples")
    a_l = complex(traj.a_l[-1])
    a_r = complex(traj.a_r[-1])
    norm = math.hypot(abs(a_l), abs(a_r))
    return QcaCellState(a_t=a_r / norm, a_b=a_l / norm, eta=eta, tau_d=tau_d)


def bit_from_polarization(p: float, threshold: float = P_THRESHOLD) -> int:
    """Classical bit of a polarization: 0 for P > 0, 1 for P < 0.

    |P| <= threshold raises IndeterminatePolarizationError; a near-degenerate
    cell must fail loudly instead of guessing.
    """
    if abs(p) <= threshold:
        raise IndeterminatePolarizationError(
            f"|P|={abs(p):.3g} <= threshold {threshold:g}; no classical value")
    return 0 if p > 0.0 else 1


def polarization_from_bit(bit: int) -> float:
    """Saturated polarization of a classical bit (bit 0 -> +1, bit 1 -> -1)."""
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    return 1.0 if bit == 0 else -1.0


def majority(p_a: float, p_b: float, p_c: float) -> float:
    """Majority vote of three cell polarizations.

    Returns the idealized saturated output polarization (+-1).  Fixing one
    input at bit 0 turns the gate into AND of the other two, fixing it at
    bit 1 into OR.  Indeterminate inputs propagate as errors.
    """
    votes = (bit_from_polarization(p_a) + bit_from_polarization(p_b)
             + bit_from_polarization(p_c))
    return polarization_from_bit(1 if votes >= 2 else 0)


@dataclass(frozen=True)
class NetlistNode:
    node_id: str
    kind: str                    # "input" | "fixed" | "maj" | "probe"
    inputs: tuple[str, ...] = ()
    bit: int | None = None       # fixed cells only


@dataclass(frozen=True)
class Netlist:
    """Validated DAG of cells and majority gates.

    ``order`` is a topological evaluation order; ``input_ids`` and
    ``probe_ids`` keep the declaration order of the source file.
    """

    nodes: Mapping[str, NetlistNode]
    order: tuple[str, ...]
    input_ids: tuple[str, ...]
    probe_ids: tuple[str, ...]


def parse_netlist(text: str) -> Netlist:
    """Parse the line-oriented netlist format.

    One node per line, ``#`` starts a comment:

        input <id>
        fixed <id> <0|1>
        maj <id> <in1> <in2> <in3>
        probe <id> <in>
    """
    nodes: dict[str, NetlistNode] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind, rest = tokens[0], tokens[1:]

        if kind == "input" and len(rest) == 1:
            node = NetlistNode(rest[0], "input")
        elif kind == "fixed" and len(rest) == 2:
            if rest[1] not in ("0", "1"):
                raise NetlistFormatError(f"line {lineno}: fixed value must be 0 or 1")
            node = NetlistNode(rest[0], "fixed", bit=int(rest[1]))
        elif kind == "maj" and len(rest) == 4:
            node = NetlistNode(rest[0], "maj", inputs=tuple(rest[1:]))
        elif kind == "probe" and len(rest) == 2:
            node = NetlistNode(rest[0], "probe", inputs=(rest[1],))
        else:
            raise NetlistFormatError(f"line {lineno}: cannot parse {line!r}")

        if node.node_id in nodes:
            raise NetlistFormatError(f"line {lineno}: duplicate node id {node.node_id!r}")
        nodes[node.node_id] = node

    for node in nodes.values():
        for ref in node.inputs:
            if ref not in nodes:
                raise UnknownNodeError(f"node {node.node_id!r} references unknown id {ref!r}")
            if nodes[ref].kind == "probe":
                raise NetlistFormatError(f"probe {ref!r} cannot feed node {node.node_id!r}")

    graph = {nid: set(node.inputs) for nid, node in nodes.items()}
    try:
        order = tuple(TopologicalSorter(graph).static_order())
    except CycleError as exc:
        raise CycleDetectedError(f"netlist contains a cycle: {exc.args[1]}") from None

    return Netlist(
        nodes=nodes,
        order=order,
        input_ids=tuple(n.node_id for n in nodes.values() if n.kind == "input"),
        probe_ids=tuple(n.node_id for n in nodes.values() if n.kind == "probe"),
    )


def load_netlist(path: str | Path) -> Netlist:
    path = Path(path)
    if not path.is_file():
        raise NetlistError(f"netlist file not found: {path}")
    return parse_netlist(path.read_text())


def eval_circuit(netlist: Netlist,
                 bits: Mapping[str, int] | None = None,
                 cells: Mapping[str, QcaCellState] | None = None) -> dict[str, int]:
    """Evaluate a netlist topologically and return {probe id: bit}.

    ``bits`` assigns classical values to input cells (emitted as saturated
    +-1 polarizations); ``cells`` binds input cells to full QcaCellState
    values whose polarization is computed, which is how a drive simulation
    steers the circuit.  Every input must be covered by exactly one of the
    two maps.
    """
    bits = dict(bits or {})
    cells = dict(cells or {})
    for name, source in (("bits", bits), ("cells", cells)):
        for key in source:
            if key not in netlist.nodes or netlist.nodes[key].kind != "input":
                raise UnknownNodeError(f"{name} entry {key!r} is not an input cell")
    both = set(bits) & set(cells)
    if both:
        raise NetlistError(f"inputs assigned both a bit and a cell: {sorted(both)}")

    pol: dict[str, float] = {}
    out: dict[str, int] = {}
    for node_id in netlist.order:
        node = netlist.nodes[node_id]
        if node.kind == "input":
            if node_id in bits:
                pol[node_id] = polarization_from_bit(bits[node_id])
            elif node_id in cells:
                pol[node_id] = polarization(cells[node_id])
            else:
                raise UnassignedInputError(f"input cell {node_id!r} was not assigned")
        elif node.kind == "fixed":
            pol[node_id] = polarization_from_bit(node.bit)
        elif node.kind == "maj":
            a, b, c = (pol[ref] for ref in node.inputs)
            pol[node_id] = majority(a, b, c)
        else:  # probe
            out[node_id] = bit_from_polarization(pol[node.inputs[0]])
    return out
