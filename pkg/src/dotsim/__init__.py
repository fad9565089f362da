"""dotsim: electron dynamics in an AC-driven coupled double quantum dot,
with localization analysis and a QCA majority-logic layer on top.

The hot RK4 loops live in a Cython extension with a pure-Python fallback
selected automatically at import; see ``dotsim.backend.KERNEL_NAME`` for
which one is active.
"""

__version__ = "0.1.0"

from .analysis import (
    BenchReport,
    DivergenceReport,
    EmptyWindowError,
    LocalizationReport,
    SweepAxis,
    SweepResult,
    UnknownAxisParameterError,
    bench_formulations,
    compare_formulations,
    localization_degree,
    sweep,
)
from .backend import KERNEL_NAME
from .dynamics import (
    AmplitudeState,
    AngleState,
    Constant,
    Envelope,
    NegativeTimeError,
    NonPositiveCapacitanceError,
    NonPositiveDistanceError,
    NotNormalizedError,
    SystemParams,
    TanhRise,
    amplitudes_from_angles,
    angles_from_amplitudes,
    charging_from_capacitance,
    eval_drive,
    eval_envelope,
    rabi_from_field,
    rhs_amplitudes,
    rhs_angles,
    wrap_angle,
)
from .integrator import (
    NonFiniteStateError,
    Scenario,
    Trajectory,
    TrajectoryWarning,
    integrate,
    rk4_step,
)
from .qca import (
    CellKet,
    CycleDetectedError,
    EmptyTrajectoryError,
    IndeterminatePolarizationError,
    Netlist,
    NetlistError,
    QcaCellState,
    UnassignedInputError,
    bit_from_polarization,
    cell_from_trajectory,
    cell_ket,
    eval_circuit,
    load_netlist,
    majority,
    parse_netlist,
    polarization,
    polarization_from_bit,
)
