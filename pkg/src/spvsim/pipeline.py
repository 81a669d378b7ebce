"""End-to-end simulation: scene -> camera -> strategy -> implant -> percept.

The Engine owns everything that is expensive and trial-independent (axon
paths, the electrode kernel).  A TrialRunner owns one trial's mutable state
and advances it frame by frame; each step renders the world as it stands,
produces the percept, and only then applies the frame's input, so a command
issued after seeing frame k first shows its effect in frame k+1.
"""

from __future__ import annotations

import dataclasses
import hashlib
import time
from dataclasses import dataclass, field

import numpy as np

from .agents import Agent, AgentContext, InputCommand, StraightToGoalAgent
from .config import SimConfig
from .frames import (
    LabeledFrame,
    StrategyConfig,
    apply_strategy,
    downscale_gray_smooth,
)
from .frameio import percept_to_u8, summarize_by_strategy
from .gaze import clamp_gaze
from .raster import checkerboard_mask, sample_electrodes
from .retina import (
    AxonMapParams,
    build_array,
    build_kernel,
    generate_axon_paths,
    make_grid,
    spatial_percept,
)
from .temporal import TemporalParams, TemporalState, step_temporal
from .townsim import (
    PlayerState,
    Scene,
    TrialState,
    clamp_player,
    detect_collisions,
    load_scene,
    render_scene,
    step_scene,
    trial_metrics,
    trial_update,
)

PLAZA_LAYOUTS = ("plaza_a", "plaza_b", "plaza_c")


class Engine:
    """Trial-independent simulation state built from one config."""

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self.axon_params = AxonMapParams(
            rho_um=cfg.implant.rho_um,
            lambda_um=cfg.implant.lambda_um,
            um_per_degree=cfg.percept.um_per_degree,
        )
        self.array = build_array(cfg.implant.rows, cfg.implant.cols,
                                 cfg.implant.spacing_um, cfg.implant.center_um)
        self.grid = make_grid(cfg.percept.width, cfg.percept.height,
                              cfg.percept.extent_deg, cfg.percept.um_per_degree)
        self.paths = generate_axon_paths(self.grid, self.axon_params,
                                         mode=cfg.implant.axon_mode)
        self.kernel = build_kernel(self.array, self.paths, self.axon_params)
        self.temporal_params = TemporalParams(
            tau_n=cfg.temporal.tau_n,
            tau_b=cfg.temporal.tau_b,
            alpha=cfg.temporal.alpha,
            dt=1.0 / cfg.trial.fps,
            literal=cfg.temporal.literal,
        )

    def strategy_config(self, kind: str | None = None) -> StrategyConfig:
        if kind is None or kind == self.cfg.strategy.kind:
            return self.cfg.strategy
        return dataclasses.replace(self.cfg.strategy, kind=kind)

    def percept_u8(self, values: np.ndarray) -> np.ndarray:
        return percept_to_u8(values, self.cfg.percept.display_scale)


@dataclass
class FrameOutput:
    frame: int  # index of the frame this percept belongs to
    t: float  # sim time of that frame
    percept: np.ndarray  # brightness state after this frame's update
    events: list  # collisions raised while advancing past this frame
    status: str  # trial status after the update
    camera: LabeledFrame | None = None


@dataclass
class TrialResult:
    metrics: dict
    outcome: str
    frames: int
    percept_digest: str
    commands: list[InputCommand] = field(default_factory=list)
    path_xy: np.ndarray | None = None


class TrialRunner:
    """One trial's world, player, percept state, and clocks."""

    def __init__(self, engine: Engine, scene: Scene, agent_states: list,
                 goal_side: str, *, strategy_kind: str | None = None):
        cfg = engine.cfg
        self.engine = engine
        self.scene = scene
        self.agent_states = agent_states
        self.strategy = engine.strategy_config(strategy_kind)
        self.player = PlayerState.at_start(scene)
        self.trial = TrialState(goal_side=goal_side,
                                duration_s=cfg.trial.duration_s,
                                countdown_s=cfg.trial.countdown_s)
        self.temporal = TemporalState.zeros((cfg.percept.height,
                                             cfg.percept.width))
        self.gaze_deg = (0.0, 0.0)
        self.pending: dict[str, np.ndarray] = {}
        self.frame = 0

    @property
    def t(self) -> float:
        return self.frame / self.engine.cfg.trial.fps

    def context(self) -> AgentContext:
        return AgentContext(t=self.t, frame=self.frame, scene=self.scene,
                            player=self.player, trial=self.trial)

    def step(self, cmd: InputCommand, *, keep_camera: bool = False) -> FrameOutput:
        """Produce the current frame's percept, then apply cmd to the world."""
        eng = self.engine
        cfg = eng.cfg
        frame = self.frame
        t = self.t

        labeled = render_scene(self.scene, self.agent_states, self.player,
                               size=cfg.render.frame_px,
                               fov_deg=cfg.render.fov_deg,
                               eye_height_m=cfg.render.eye_height_m)
        # camera already renders at the working resolution, so this stage
        # reduces to the 3x3 smoothing pass of the VPU front end
        working = downscale_gray_smooth(labeled, out_size=cfg.render.frame_px)
        processed = apply_strategy(working, self.strategy, t)
        eligible = checkerboard_mask(eng.array, frame)
        acts = sample_electrodes(processed, eng.array, eng.axon_params,
                                 gaze_deg=self.gaze_deg, eligible=eligible,
                                 fov_deg=cfg.render.fov_deg,
                                 mode=self.strategy.sampling)
        drive = spatial_percept(acts, eng.kernel, eng.paths, eng.grid, t).values
        step_temporal(self.temporal, drive, eng.temporal_params)
        percept = self.temporal.b.copy()

        # world advances only after the percept is out: one frame of latency
        self.gaze_deg = clamp_gaze(cmd.gaze_deg, fov_deg=cfg.render.fov_deg,
                                   window_deg=cfg.trial.gaze_window_deg)
        dt = 1.0 / cfg.trial.fps
        self.player.heading_deg = (self.player.heading_deg
                                   + cmd.turn * cfg.player.turn_deg_s * dt)
        h_rad = np.radians(self.player.heading_deg)
        stride = cmd.move * cfg.player.speed_m_s * dt
        pos = self.player.pos + stride * np.array([np.cos(h_rad), np.sin(h_rad)])
        self.player.pos = clamp_player(self.scene, pos,
                                       margin=cfg.player.radius_m)

        self.frame = frame + 1
        t_next = self.frame / cfg.trial.fps
        step_scene(self.agent_states, dt, t_next)
        events = detect_collisions(self.scene, self.agent_states,
                                   self.player.pos, t_next, self.pending,
                                   player_radius=cfg.player.radius_m,
                                   clear_m=cfg.trial.cooldown_m)
        trial_update(self.trial, self.scene, self.player.pos, events, t_next)

        return FrameOutput(frame=frame, t=t, percept=percept, events=events,
                           status=self.trial.status,
                           camera=labeled if keep_camera else None)


def run_trial(engine: Engine, agent: Agent, *, layout: str | dict,
              goal_side: str, rng: np.random.Generator | None = None,
              strategy_kind: str | None = None, record: bool = False,
              frame_hook=None) -> TrialResult:
    """Run one trial to completion under a scripted agent."""
    scene, states = load_scene(layout, rng)
    runner = TrialRunner(engine, scene, states, goal_side,
                         strategy_kind=strategy_kind)
    digest = hashlib.blake2b(digest_size=16)
    commands: list[InputCommand] = []
    path_xy = [runner.player.pos.copy()]

    while not runner.trial.done:
        cmd = agent.decide(runner.context()).clipped()
        out = runner.step(cmd)
        digest.update(engine.percept_u8(out.percept).tobytes())
        path_xy.append(runner.player.pos.copy())
        if record:
            commands.append(cmd)
        if frame_hook is not None:
            frame_hook(runner, out)

    return TrialResult(
        metrics=trial_metrics(runner.trial).as_dict(),
        outcome=runner.trial.status,
        frames=runner.frame,
        percept_digest=digest.hexdigest(),
        commands=commands,
        path_xy=np.array(path_xy),
    )


def strategy_order(seed: int, strategies=None) -> list[str]:
    """Control always leads; the remaining blocks alternate by seed parity."""
    if strategies is None:
        strategies = ("Control", "SemanticEdges", "SemanticRaster")
    control = [s for s in strategies if s == "Control"]
    rest = [s for s in strategies if s != "Control"]
    if seed % 2 == 1:
        rest = rest[::-1]
    return control + rest


def run_batch(cfg: SimConfig, *, agent_factory=None, engine: Engine | None = None,
              frame_hook_factory=None) -> dict:
    """Run the full block design and return a deterministic log dict.

    Every trial draws its layout, goal side, and agent parameters from its
    own child of the batch seed, so logs and percept digests are reproducible
    bit for bit.  No wall-clock values enter the log.
    """
    if engine is None:
        engine = Engine(cfg)
    order = strategy_order(cfg.batch.seed, cfg.batch.strategies)
    n_trials = len(order) * cfg.batch.trials_per_strategy
    children = np.random.SeedSequence(cfg.batch.seed).spawn(n_trials)

    rows = []
    idx = 0
    for block, kind in enumerate(order):
        for trial_i in range(cfg.batch.trials_per_strategy):
            child = children[idx]
            idx += 1
            rng = np.random.default_rng(child)
            layout = cfg.scene.layout
            if layout == "random":
                layout = PLAZA_LAYOUTS[int(rng.integers(len(PLAZA_LAYOUTS)))]
            goal_side = cfg.scene.goal_side
            if goal_side == "random":
                goal_side = ("left", "right")[int(rng.integers(2))]
            agent = (agent_factory(kind, trial_i) if agent_factory is not None
                     else StraightToGoalAgent())
            hook = (frame_hook_factory(block, kind, trial_i)
                    if frame_hook_factory is not None else None)
            result = run_trial(engine, agent, layout=layout,
                               goal_side=goal_side, rng=rng,
                               strategy_kind=kind, frame_hook=hook)
            rows.append({
                "block": block,
                "strategy": kind,
                "trial": trial_i,
                "layout": layout,
                "goal_side": goal_side,
                "seed": int(child.generate_state(1)[0]),
                "frames": result.frames,
                "percept_digest": result.percept_digest,
                **result.metrics,
            })

    return {
        "seed": cfg.batch.seed,
        "order": order,
        "rows": rows,
        "summary": summarize_by_strategy(rows),
    }


def bench(cfg: SimConfig, *, n_frames: int = 270, layout: str = "plaza_a",
          warmup: int = 30) -> dict:
    """Measure sustained full-pipeline frame rate on one layout."""
    engine = Engine(cfg)
    scene, states = load_scene(layout, np.random.default_rng(0))
    runner = TrialRunner(engine, scene, states, goal_side="left")
    cmd = InputCommand(move=0.4, turn=0.1)
    for _ in range(warmup):
        runner.step(cmd)
    start = time.perf_counter()
    for _ in range(n_frames):
        runner.step(cmd)
    elapsed = time.perf_counter() - start
    ms = 1000.0 * elapsed / n_frames
    return {
        "frames": n_frames,
        "ms_per_frame": ms,
        "fps": 1000.0 / ms,
        "target_fps": cfg.trial.fps,
        "meets_target": 1000.0 / ms >= cfg.trial.fps,
    }
