"""First-person rendering of a scene into a labeled intensity frame.

Column raycaster in the style of early grid engines: every screen column is
one ray in the horizontal plane, and the nearest hit paints a vertical band
whose extent follows the pinhole projection of the object's height.  Ground
and sky carry zero intensity so that an empty view produces no gradients
downstream; objects are flat-shaded by class with a linear distance falloff.
"""

from __future__ import annotations

import numpy as np

from ..frames import CLASS_IDS, LabeledFrame
from .geometry import Box, Circle, Shape, ray_shape
from .scene import AgentState, PlayerState, Scene

EYE_HEIGHT_M = 1.6
WALL_HEIGHT_M = 2.5
WALL_THICKNESS_M = 0.3
SHADE_FALLOFF_M = 12.0
SHADE_FLOOR = 0.25
_MIN_DIST_M = 0.05

CLASS_SHADE = {
    "structure": 0.85,
    "pedestrian": 0.9,
    "bicycle": 1.0,
    "goal": 0.75,
}


def wall_boxes(scene: Scene) -> list[Box]:
    hx, hy = scene.half_extent
    t = WALL_THICKNESS_M
    return [
        Box(0.0, hy + t / 2, scene.bounds[0] + 2 * t, t),   # north
        Box(0.0, -hy - t / 2, scene.bounds[0] + 2 * t, t),  # south
        Box(hx + t / 2, 0.0, t, scene.bounds[1] + 2 * t),   # east
        Box(-hx - t / 2, 0.0, t, scene.bounds[1] + 2 * t),  # west
    ]


def _renderables(scene: Scene, states: list[AgentState]
                 ) -> list[tuple[Shape, str, float]]:
    """(shape, class name, height) for everything the camera can see."""
    out: list[tuple[Shape, str, float]] = []
    for obs in scene.statics:
        out.append((obs.shape, obs.class_name, obs.height_m))
    for obs in scene.markers:
        out.append((obs.shape, obs.class_name, obs.height_m))
    for st in states:
        if st.active:
            out.append((Circle(float(st.pos[0]), float(st.pos[1]),
                               st.spec.radius_m),
                        st.spec.class_name, st.spec.height_m))
    if scene.walls:
        for box in wall_boxes(scene):
            out.append((box, "structure", WALL_HEIGHT_M))
    return out


def render_scene(scene: Scene, states: list[AgentState], player: PlayerState,
                 *, size: int = 200, fov_deg: float = 60.0,
                 eye_height_m: float = EYE_HEIGHT_M) -> LabeledFrame:
    """Render the player's view as a size x size labeled frame."""
    w = h = int(size)
    half_tan = np.tan(np.radians(fov_deg) / 2.0)
    # column j looks along heading - atan(u_j); column 0 is the left edge
    u = half_tan * (2.0 * (np.arange(w) + 0.5) / w - 1.0)
    ang = np.radians(player.heading_deg) - np.arctan(u)
    dirs = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    cos_off = 1.0 / np.sqrt(1.0 + u * u)

    intensity = np.zeros((h, w))
    labels = np.full((h, w), CLASS_IDS["background"], dtype=np.uint8)
    horizon = (h - 1) / 2.0
    rows = np.arange(h, dtype=float)[:, None]
    labels[rows[:, 0] > horizon, :] = CLASS_IDS["ground"]

    items = _renderables(scene, states)
    if not items:
        return LabeledFrame(intensity=intensity, labels=labels)

    t_all = np.stack([ray_shape(player.pos, dirs, shape)
                      for shape, _, _ in items])
    win = np.argmin(t_all, axis=0)
    t_hit = t_all[win, np.arange(w)]
    hit = np.isfinite(t_hit)

    heights = np.array([hm for _, _, hm in items])
    class_ids = np.array([CLASS_IDS[cn] for _, cn, _ in items], dtype=np.uint8)
    bases = np.array([CLASS_SHADE.get(cn, 0.8) for _, cn, _ in items])

    d = np.maximum(t_hit * cos_off, _MIN_DIST_M)  # perpendicular distance
    f_px = (w / 2.0) / half_tan
    top = horizon - f_px * (heights[win] - eye_height_m) / d
    bot = horizon + f_px * eye_height_m / d
    shade = bases[win] * np.clip(1.0 - d / SHADE_FALLOFF_M, SHADE_FLOOR, 1.0)

    in_band = hit[None, :] & (rows >= top[None, :]) & (rows <= bot[None, :])
    intensity = np.where(in_band, shade[None, :], intensity)
    labels = np.where(in_band, class_ids[win][None, :], labels)
    return LabeledFrame(intensity=intensity, labels=labels)
