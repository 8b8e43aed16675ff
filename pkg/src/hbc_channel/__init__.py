"""Lumped-capacitance channel model for electro-quasistatic body-coupled links.

The package computes every capacitance of a wearable-device body channel
from geometry and position, evaluates the closed-form voltage transfer
functions, cross-checks them against an independent nodal circuit solver,
extracts body capacitance from synthetic resonance sweeps, and runs
parameter sweeps through a CLI with CSV output.
"""

from .config import (
    ConfigError,
    EqsRegimeWarning,
    ParsedConfig,
    ScenarioConfig,
    SideConfig,
    build_scenario,
    effective_coupling_capacitance,
    load_config_file,
)
from .constants import (
    COUPLED_COUPLING_F,
    DECOUPLING_DISTANCE_M,
    DISTANT_COUPLING_F,
    EPSILON_0,
    EQS_MAX_FREQUENCY_HZ,
)
from .geometry import (
    CouplingConstant,
    DeviceGeometry,
    calibrate_coupling_constant,
    coupling_capacitance,
    disc_self_capacitance,
    ground_to_body_capacitance,
    plate_to_plate_capacitance,
    return_path_capacitance,
)
from .network import (
    CapNetwork,
    SingularNetworkError,
    TransferSolution,
    build_channel_network,
    solve_transfer,
    well_posedness_check,
)
from .profiles import ShadowingProfile, shadowing_factor
from .resonance import (
    BoundaryPeakError,
    DielectricTable,
    FlatSweepError,
    FrequencySweep,
    ResonanceCircuit,
    body_capacitance_lookup,
    capacitance_from_resonance,
    default_frequency_grid,
    extract_body_capacitance,
    find_resonant_frequency,
    lc_response,
)
from .sweep import SweepResult, SweepRow, SweepSpec, emit_csv, read_sweep_csv, run_sweep
from .transfer import (
    ChannelScenario,
    DegenerateScenarioError,
    GeometricProvenance,
    TransferReport,
    body_potential_ratio,
    compare_closed_forms,
    extract_return_path,
    full_transfer,
    geometric_transfer,
    ratio_to_db,
    regime_flags,
    relative_error,
    rx_transfer_distant,
    simplified_transfer,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryPeakError",
    "CapNetwork",
    "ChannelScenario",
    "ConfigError",
    "COUPLED_COUPLING_F",
    "CouplingConstant",
    "DECOUPLING_DISTANCE_M",
    "DegenerateScenarioError",
    "DeviceGeometry",
    "DielectricTable",
    "DISTANT_COUPLING_F",
    "EPSILON_0",
    "EQS_MAX_FREQUENCY_HZ",
    "EqsRegimeWarning",
    "FlatSweepError",
    "FrequencySweep",
    "GeometricProvenance",
    "ParsedConfig",
    "ResonanceCircuit",
    "ScenarioConfig",
    "ShadowingProfile",
    "SideConfig",
    "SingularNetworkError",
    "SweepResult",
    "SweepRow",
    "SweepSpec",
    "TransferReport",
    "TransferSolution",
    "body_capacitance_lookup",
    "body_potential_ratio",
    "build_channel_network",
    "build_scenario",
    "calibrate_coupling_constant",
    "capacitance_from_resonance",
    "compare_closed_forms",
    "coupling_capacitance",
    "default_frequency_grid",
    "disc_self_capacitance",
    "effective_coupling_capacitance",
    "emit_csv",
    "extract_body_capacitance",
    "extract_return_path",
    "find_resonant_frequency",
    "full_transfer",
    "geometric_transfer",
    "ground_to_body_capacitance",
    "lc_response",
    "load_config_file",
    "plate_to_plate_capacitance",
    "ratio_to_db",
    "read_sweep_csv",
    "regime_flags",
    "relative_error",
    "return_path_capacitance",
    "run_sweep",
    "rx_transfer_distant",
    "shadowing_factor",
    "simplified_transfer",
    "solve_transfer",
    "well_posedness_check",
]
