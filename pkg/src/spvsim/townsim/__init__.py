"""Deterministic town-square wayfinding simulator."""

from .geometry import Box, Circle, Shape, ray_box, ray_circle, ray_shape
from .render import render_scene, wall_boxes
from .scene import (
    COLLISION_CLEAR_M,
    PLAYER_RADIUS_M,
    AgentSpec,
    AgentState,
    CollisionEvent,
    Obstacle,
    PlayerState,
    Scene,
    SceneError,
    builtin_layouts,
    clamp_player,
    detect_collisions,
    load_scene,
    parse_layout,
    step_scene,
)
from .trial import (
    COUNTDOWN_S,
    TRIAL_DURATION_S,
    TrialMetrics,
    TrialState,
    metrics_summary,
    trial_metrics,
    trial_update,
)

__all__ = [
    "AgentSpec", "AgentState", "Box", "Circle", "CollisionEvent",
    "COLLISION_CLEAR_M", "COUNTDOWN_S", "Obstacle", "PLAYER_RADIUS_M",
    "PlayerState", "Scene", "SceneError", "Shape", "TRIAL_DURATION_S",
    "TrialMetrics", "TrialState", "builtin_layouts", "clamp_player",
    "detect_collisions", "load_scene", "metrics_summary", "parse_layout",
    "ray_box", "ray_circle", "ray_shape", "render_scene", "step_scene",
    "trial_metrics", "trial_update", "wall_boxes",
]
