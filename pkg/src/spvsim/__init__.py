"""Simulated prosthetic vision in a deterministic wayfinding simulator.

The package turns a first-person view of a small town square into the
percept an epiretinal implant wearer would see: scene frames are reduced by
a scene-simplification strategy, sampled at the electrode positions under
the current gaze, spread through an axon-map spatial model, and integrated
by a two-state temporal model with slow charge-driven fading.  Everything is
seeded and frame-clocked, so whole trial batches reproduce bit for bit.
"""

from .agents import (
    Agent,
    AgentContext,
    IdleAgent,
    InputCommand,
    ReplayAgent,
    StraightToGoalAgent,
    WaypointAgent,
)
from .config import ConfigError, SimConfig, config_from_dict, config_to_dict, load_config
from .frames import (
    CLASS_IDS,
    CLASS_NAMES,
    STRATEGY_KINDS,
    LabeledFrame,
    StrategyConfig,
    active_class,
    apply_strategy,
    downscale_gray_smooth,
    semantic_mask,
    sobel_magnitude,
)
from .frameio import montage, percept_to_u8, read_pgm, write_pgm
from .gaze import (
    DotTrajectory,
    GazeAccuracyStats,
    clamp_gaze,
    gaze_accuracy_stats,
    gaze_window,
    generate_dot_trajectory,
)
from .pipeline import (
    Engine,
    FrameOutput,
    TrialResult,
    TrialRunner,
    bench,
    run_batch,
    run_trial,
    strategy_order,
)
from .raster import checkerboard_mask, sample_electrodes
from .retina import (
    AxonMapParams,
    AxonPathSet,
    ElectrodeArray,
    KernelMatrix,
    PerceptFrame,
    VisualFieldGrid,
    build_array,
    build_kernel,
    generate_axon_paths,
    make_grid,
    spatial_percept,
    trace_bundles,
)
from .temporal import TemporalParams, TemporalState, step_temporal

__version__ = "0.1.0"

__all__ = [
    "Agent", "AgentContext", "AxonMapParams", "AxonPathSet", "CLASS_IDS",
    "CLASS_NAMES", "ConfigError", "DotTrajectory", "ElectrodeArray",
    "Engine", "FrameOutput", "GazeAccuracyStats", "IdleAgent",
    "InputCommand", "KernelMatrix", "LabeledFrame", "PerceptFrame",
    "ReplayAgent", "STRATEGY_KINDS", "SimConfig", "StraightToGoalAgent",
    "StrategyConfig", "TemporalParams", "TemporalState", "TrialResult",
    "TrialRunner", "VisualFieldGrid", "WaypointAgent", "active_class",
    "apply_strategy", "bench", "build_array", "build_kernel",
    "checkerboard_mask", "clamp_gaze", "config_from_dict", "config_to_dict",
    "downscale_gray_smooth", "gaze_accuracy_stats", "gaze_window",
    "generate_axon_paths", "generate_dot_trajectory", "load_config",
    "make_grid", "montage", "percept_to_u8", "read_pgm", "run_batch",
    "run_trial", "sample_electrodes", "semantic_mask", "sobel_magnitude",
    "spatial_percept", "step_temporal", "strategy_order", "trace_bundles",
    "write_pgm",
]
