"""Town-square scenes: static obstacles, path-following agents, collisions.

A scene lives in a square plan-view coordinate frame centered on the plaza,
x east and y north in meters, so a 10 x 10 m square spans [-5, 5] on both
axes.  Static obstacles are circles or axis-aligned boxes; moving agents
follow polyline paths at a per-trial speed drawn from the layout's range.
Collisions are point-vs-solid tests against the player's body radius with a
per-object cooldown: once an object is hit it cannot re-trigger until the
player has retreated a fixed distance from the contact point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ..frames import CLASS_IDS
from .geometry import Box, Circle, Shape

PLAYER_RADIUS_M = 0.25
COLLISION_CLEAR_M = 0.25


@dataclass(frozen=True)
class Obstacle:
    name: str
    class_name: str
    shape: Shape
    height_m: float
    collidable: bool = True


@dataclass(frozen=True)
class AgentSpec:
    name: str
    class_name: str
    waypoints: np.ndarray  # (k, 2) path vertices in meters
    speed_range: tuple[float, float]
    delay_range: tuple[float, float]
    radius_m: float
    height_m: float
    loop: bool = True


@dataclass
class AgentState:
    spec: AgentSpec
    speed: float
    delay: float
    pos: np.ndarray
    heading_rad: float
    progress: float = 0.0  # arc length along the path, meters
    active: bool = True
    # closed-loop paths revisit the first vertex; cached cumulative lengths
    _verts: np.ndarray = field(default=None, repr=False)
    _cum: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        verts = np.asarray(self.spec.waypoints, dtype=float)
        if self.spec.loop:
            verts = np.vstack([verts, verts[:1]])
        seg = np.linalg.norm(np.diff(verts, axis=0), axis=1)
        if np.any(seg <= 0):
            raise ValueError(f"agent {self.spec.name!r} has a zero-length path segment")
        self._verts = verts
        self._cum = np.concatenate([[0.0], np.cumsum(seg)])

    @property
    def path_length(self) -> float:
        return float(self._cum[-1])

    def _locate(self, s: float) -> tuple[np.ndarray, float]:
        """Position and tangent heading at arc length s along the path."""
        cum = self._cum
        i = int(np.searchsorted(cum, s, side="right")) - 1
        i = min(max(i, 0), len(cum) - 2)
        seg = self._verts[i + 1] - self._verts[i]
        seg_len = cum[i + 1] - cum[i]
        frac = (s - cum[i]) / seg_len
        pos = self._verts[i] + np.clip(frac, 0.0, 1.0) * seg
        return pos, float(np.arctan2(seg[1], seg[0]))

    def advance(self, dt: float, t_now: float) -> None:
        """Move along the path; t_now is the sim time at the end of the step."""
        if not self.active:
            return
        run = t_now - self.delay
        if run <= 0.0:
            return
        self.progress += self.speed * min(dt, run)
        total = self.path_length
        if self.spec.loop:
            self.progress %= total
        elif self.progress >= total:
            self.progress = total
            self.active = False
        self.pos, self.heading_rad = self._locate(self.progress)


@dataclass(frozen=True)
class Scene:
    id: str
    bounds: tuple[float, float]  # (width, height) in meters, centered on 0
    start_pos: tuple[float, float]
    start_heading_deg: float
    goals: dict[str, Box]  # side name -> region
    statics: tuple[Obstacle, ...]
    markers: tuple[Obstacle, ...]  # render-only, never collide
    agent_specs: tuple[AgentSpec, ...]
    walls: bool = True

    @property
    def half_extent(self) -> tuple[float, float]:
        return self.bounds[0] / 2.0, self.bounds[1] / 2.0


@dataclass
class PlayerState:
    pos: np.ndarray
    heading_deg: float

    @classmethod
    def at_start(cls, scene: Scene) -> "PlayerState":
        return cls(pos=np.array(scene.start_pos, dtype=float),
                   heading_deg=float(scene.start_heading_deg))


@dataclass(frozen=True)
class CollisionEvent:
    t: float
    name: str
    class_name: str
    moving: bool
    pos: tuple[float, float]  # player position at contact
    backup_dir: tuple[float, float]  # unit vector pointing away from the object


class SceneError(ValueError):
    pass


def _parse_shape(entry: dict, where: str) -> Shape:
    if "circle" in entry:
        cx, cy, r = entry["circle"]
        if r <= 0:
            raise SceneError(f"{where}: circle radius must be positive")
        return Circle(float(cx), float(cy), float(r))
    if "box" in entry:
        cx, cy, w, h = entry["box"]
        if w <= 0 or h <= 0:
            raise SceneError(f"{where}: box sides must be positive")
        return Box(float(cx), float(cy), float(w), float(h))
    raise SceneError(f"{where}: expected a 'circle' or 'box' shape")


def _parse_range(value, where: str) -> tuple[float, float]:
    lo, hi = float(value[0]), float(value[1])
    if not (0 <= lo <= hi):
        raise SceneError(f"{where}: bad range {value!r}")
    return lo, hi


def parse_layout(data: dict) -> Scene:
    try:
        scene_id = str(data["id"])
        bw, bh = (float(v) for v in data["bounds"])
        start = data["start"]
        start_pos = (float(start["pos"][0]), float(start["pos"][1]))
        heading = float(start.get("heading_deg", 90.0))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise SceneError(f"layout missing required field: {exc}") from exc
    if bw <= 0 or bh <= 0:
        raise SceneError("layout bounds must be positive")

    goals: dict[str, Box] = {}
    for side, rect in data.get("goals", {}).items():
        cx, cy, w, h = (float(v) for v in rect)
        goals[side] = Box(cx, cy, w, h)

    names: set[str] = set()

    def _claim(name: str) -> str:
        if name in names:
            raise SceneError(f"duplicate object name {name!r}")
        names.add(name)
        return name

    def _class(entry: dict, where: str) -> str:
        cname = entry.get("class", "structure")
        if cname not in CLASS_IDS:
            raise SceneError(f"{where}: unknown class {cname!r}")
        return cname

    statics = []
    for entry in data.get("statics", []):
        name = _claim(str(entry["name"]))
        statics.append(Obstacle(
            name=name,
            class_name=_class(entry, name),
            shape=_parse_shape(entry, name),
            height_m=float(entry.get("height", 1.0)),
        ))

    markers = []
    for entry in data.get("markers", []):
        name = _claim(str(entry["name"]))
        markers.append(Obstacle(
            name=name,
            class_name=_class(entry, name),
            shape=_parse_shape(entry, name),
            height_m=float(entry.get("height", 0.25)),
            collidable=False,
        ))

    agents = []
    for entry in data.get("agents", []):
        name = _claim(str(entry["name"]))
        waypoints = np.asarray(entry["waypoints"], dtype=float)
        if waypoints.ndim != 2 or waypoints.shape[0] < 2 or waypoints.shape[1] != 2:
            raise SceneError(f"{name}: waypoints must be (k>=2, 2)")
        agents.append(AgentSpec(
            name=name,
            class_name=_class(entry, name),
            waypoints=waypoints,
            speed_range=_parse_range(entry["speed"], name),
            delay_range=_parse_range(entry.get("delay", [0, 0]), name),
            radius_m=float(entry.get("radius", 0.35)),
            height_m=float(entry.get("height", 1.7)),
            loop=bool(entry.get("loop", True)),
        ))

    return Scene(
        id=scene_id,
        bounds=(bw, bh),
        start_pos=start_pos,
        start_heading_deg=heading,
        goals=goals,
        statics=tuple(statics),
        markers=tuple(markers),
        agent_specs=tuple(agents),
        walls=bool(data.get("walls", True)),
    )


def _layout_text(layout: str) -> str:
    path = Path(layout)
    if path.suffix == ".json" and path.exists():
        return path.read_text()
    ref = resources.files("spvsim").joinpath("layouts", f"{layout}.json")
    if not ref.is_file():
        raise SceneError(f"unknown layout {layout!r}")
    return ref.read_text()


def builtin_layouts() -> list[str]:
    root = resources.files("spvsim").joinpath("layouts")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_scene(layout: str | dict, rng: np.random.Generator | None = None,
               ) -> tuple[Scene, list[AgentState]]:
    """Build a scene and draw per-trial agent speeds and start delays.

    `layout` is a built-in layout id, a path to a layout JSON file, or an
    already-parsed layout dict.  Without an rng, every agent takes the
    midpoint of its speed range and zero delay.
    """
    if isinstance(layout, dict):
        data = layout
    else:
        data = json.loads(_layout_text(layout))
    scene = parse_layout(data)

    states = []
    for spec in scene.agent_specs:
        if rng is None:
            speed = (spec.speed_range[0] + spec.speed_range[1]) / 2.0
            delay = 0.0
        else:
            speed = float(rng.uniform(*spec.speed_range))
            delay = float(rng.uniform(*spec.delay_range))
        st = AgentState(spec, speed, delay,
                        pos=np.asarray(spec.waypoints[0], dtype=float),
                        heading_rad=0.0)
        st.pos, st.heading_rad = st._locate(0.0)
        states.append(st)
    return scene, states


def step_scene(states: list[AgentState], dt: float, t_now: float) -> None:
    """Advance all agents by one step ending at sim time t_now."""
    for st in states:
        st.advance(dt, t_now)


def clamp_player(scene: Scene, pos: np.ndarray,
                 margin: float = PLAYER_RADIUS_M) -> np.ndarray:
    """Keep the player's body inside the walled square."""
    hx, hy = scene.half_extent
    return np.array([np.clip(pos[0], -hx + margin, hx - margin),
                     np.clip(pos[1], -hy + margin, hy - margin)])


def detect_collisions(scene: Scene, states: list[AgentState],
                      player_pos: np.ndarray, t: float,
                      pending: dict[str, np.ndarray],
                      *, player_radius: float = PLAYER_RADIUS_M,
                      clear_m: float = COLLISION_CLEAR_M) -> list[CollisionEvent]:
    """One collision pass; `pending` maps object name -> contact anchor.

    An object in `pending` cannot re-trigger.  Anchors clear once the player
    is at least `clear_m` from the recorded contact position, before this
    frame's overlap tests, so a retreat-and-return counts as a new event.
    """
    for name in [n for n, anchor in pending.items()
                 if np.hypot(*(player_pos - anchor)) >= clear_m]:
        del pending[name]

    events: list[CollisionEvent] = []

    def _emit(name: str, class_name: str, moving: bool, away: np.ndarray) -> None:
        norm = float(np.hypot(*away))
        unit = away / norm if norm > 0 else np.array([1.0, 0.0])
        events.append(CollisionEvent(
            t=t, name=name, class_name=class_name, moving=moving,
            pos=(float(player_pos[0]), float(player_pos[1])),
            backup_dir=(float(unit[0]), float(unit[1])),
        ))
        pending[name] = player_pos.copy()

    for obs in scene.statics:
        if not obs.collidable or obs.name in pending:
            continue
        if obs.shape.distance(player_pos) < player_radius:
            away = player_pos - obs.shape.closest_point(player_pos)
            if np.hypot(*away) == 0.0:  # center inside the solid
                away = player_pos - np.array([obs.shape.cx, obs.shape.cy])
            _emit(obs.name, obs.class_name, moving=False, away=away)

    for st in states:
        if not st.active or st.spec.name in pending:
            continue
        gap = np.hypot(*(player_pos - st.pos))
        if gap < player_radius + st.spec.radius_m:
            _emit(st.spec.name, st.spec.class_name, moving=True,
                  away=player_pos - st.pos)

    return events
