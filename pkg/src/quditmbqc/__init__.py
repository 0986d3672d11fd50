"""Qudit cluster-state computation: dense simulation, error-frame tracking,
measurement patterns, mutually unbiased bases and Clifford checks."""

from .algorithms import HiddenShiftInstance, oracle_uf, run_circuit_reference, run_cluster_version
from .cluster import (
    ClusterGraph,
    MeasurementRecord,
    StateVector,
    build_cluster_state,
    measure_in_basis,
    measure_sampled,
    stabilizer_operator,
    verify_stabilizers,
    z_measure_removal_check,
)
from .clifford import (
    PauliLabel,
    SymplecticAction,
    build_c_imn,
    commutator_exponent,
    conjugate_pauli,
    verify_generation,
)
from .errors import (
    DecompositionFailed,
    GraphError,
    InvalidDimensionError,
    NotAUnitError,
    NotCliffordError,
    NotUnitaryError,
    ParseError,
    PatternError,
    QuditError,
    ShapeMismatchError,
    UnsupportedDimensionError,
    UnsupportedTopologyError,
)
from .frame import (
    AdaptationRule,
    ErrorFrame,
    FrameEntry,
    absorb_adaptive_fc,
    absorb_teleport,
    classical_readout_correct,
    commute_frame_through_cz,
    mub_index_phase_vector,
    realize_frame,
    scale_phase_vector,
    shift_phase_vector,
    verify_swap_identities,
)
from .mub import (
    GatePattern,
    MubFamily,
    build_mub_family,
    compile_gate,
    eigenphase_relation_check,
    euler_universality_demo,
    solve_alpha,
    spanning_rank,
)
from .qudit_math import (
    ModUnit,
    controlled_z,
    equal_up_to_phase,
    fourier_gate,
    pauli_gates,
    perm_gate_sc,
    phase_gate,
    unit_inverse,
)
from .teleport import (
    InteractStep,
    MeasurementPattern,
    MeasureStep,
    PatternResult,
    one_dit_teleport,
    run_grid_pattern,
    run_pattern,
)

__version__ = "0.1.0"

__all__ = [
    "absorb_adaptive_fc",
    "absorb_teleport",
    "AdaptationRule",
    "build_c_imn",
    "build_cluster_state",
    "build_mub_family",
    "classical_readout_correct",
    "ClusterGraph",
    "commutator_exponent",
    "commute_frame_through_cz",
    "compile_gate",
    "conjugate_pauli",
    "controlled_z",
    "DecompositionFailed",
    "eigenphase_relation_check",
    "equal_up_to_phase",
    "ErrorFrame",
    "euler_universality_demo",
    "fourier_gate",
    "FrameEntry",
    "GatePattern",
    "GraphError",
    "HiddenShiftInstance",
    "InteractStep",
    "InvalidDimensionError",
    "measure_in_basis",
    "measure_sampled",
    "MeasurementPattern",
    "MeasurementRecord",
    "MeasureStep",
    "ModUnit",
    "mub_index_phase_vector",
    "MubFamily",
    "NotAUnitError",
    "NotCliffordError",
    "NotUnitaryError",
    "one_dit_teleport",
    "oracle_uf",
    "ParseError",
    "PatternError",
    "PatternResult",
    "pauli_gates",
    "PauliLabel",
    "perm_gate_sc",
    "phase_gate",
    "QuditError",
    "realize_frame",
    "run_circuit_reference",
    "run_cluster_version",
    "run_grid_pattern",
    "run_pattern",
    "scale_phase_vector",
    "ShapeMismatchError",
    "shift_phase_vector",
    "solve_alpha",
    "spanning_rank",
    "stabilizer_operator",
    "StateVector",
    "SymplecticAction",
    "unit_inverse",
    "UnsupportedDimensionError",
    "UnsupportedTopologyError",
    "verify_generation",
    "verify_stabilizers",
    "verify_swap_identities",
    "z_measure_removal_check",
]
