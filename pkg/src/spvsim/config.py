"""Engine configuration: nested dataclasses, JSON files, dotted overrides.

A config can come from (in increasing precedence) the dataclass defaults, a
JSON file (path argument or the SPVSIM_CONFIG environment variable), and
command-line ``--set dotted.path=value`` overrides.  Errors always name the
offending field by its dotted path.
"""

from __future__ import annotations

import dataclasses
import json
import os
import types
import typing
from dataclasses import dataclass, field
from pathlib import Path

from .frames import CLASS_IDS, STRATEGY_KINDS, StrategyConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ImplantConfig:
    rows: int = 10
    cols: int = 10
    spacing_um: float = 400.0
    center_um: tuple[float, float] = (0.0, 0.0)
    rho_um: float = 200.0
    lambda_um: float = 400.0
    axon_mode: str = "spiral"  # "spiral" | "point"


@dataclass(frozen=True)
class PerceptConfig:
    # 14.6 deg at 128 px is a 32 um pitch, comfortably under the 400 um
    # electrode spacing; the grid spans the full gaze window.
    width: int = 128
    height: int = 128
    extent_deg: float = 14.6
    um_per_degree: float = 280.0
    display_scale: float = 4.0  # brightness gain before u8 quantization


@dataclass(frozen=True)
class TemporalConfig:
    tau_n: float = 0.2
    tau_b: float = 5.0
    alpha: float = 0.2
    literal: bool = True


@dataclass(frozen=True)
class RenderConfig:
    frame_px: int = 200
    fov_deg: float = 60.0
    eye_height_m: float = 1.6


@dataclass(frozen=True)
class TrialSettings:
    duration_s: float = 50.0
    countdown_s: float = 10.0
    fps: float = 90.0
    gaze_window_deg: float = 14.6
    cooldown_m: float = 0.25  # back-up distance that re-arms collision events


@dataclass(frozen=True)
class PlayerConfig:
    speed_m_s: float = 1.4
    turn_deg_s: float = 120.0
    radius_m: float = 0.25


@dataclass(frozen=True)
class SceneSettings:
    layout: str = "random"  # layout id, path to a JSON file, or "random"
    goal_side: str = "random"  # "left" | "right" | "random"


@dataclass(frozen=True)
class BatchConfig:
    seed: int = 0
    trials_per_strategy: int = 2
    strategies: tuple[str, ...] = STRATEGY_KINDS


@dataclass(frozen=True)
class IOConfig:
    out_dir: str = "runs"
    dump_frames: bool = False
    dump_every: int = 45  # frame stride between percept image dumps


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8765
    realtime: bool = True
    static_dir: str = ""  # optional directory served at /, e.g. a built client


@dataclass(frozen=True)
class SimConfig:
    implant: ImplantConfig = field(default_factory=ImplantConfig)
    percept: PerceptConfig = field(default_factory=PerceptConfig)
    temporal: TemporalConfig = field(default_factory=TemporalConfig)
    strategy: StrategyConfig = field(default_factory=StrategyConfig)
    render: RenderConfig = field(default_factory=RenderConfig)
    trial: TrialSettings = field(default_factory=TrialSettings)
    player: PlayerConfig = field(default_factory=PlayerConfig)
    scene: SceneSettings = field(default_factory=SceneSettings)
    batch: BatchConfig = field(default_factory=BatchConfig)
    io: IOConfig = field(default_factory=IOConfig)
    service: ServiceConfig = field(default_factory=ServiceConfig)


def _coerce(value, ftype, path: str):
    origin = typing.get_origin(ftype)
    if origin in (typing.Union, types.UnionType):  # Optional[...] annotations
        args = [a for a in typing.get_args(ftype) if a is not type(None)]
        if value is None:
            return None
        return _coerce(value, args[0], path)
    if origin is tuple:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{path}: expected a list, got {value!r}")
        args = typing.get_args(ftype)
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(_coerce(v, args[0], f"{path}[{i}]")
                         for i, v in enumerate(value))
        if len(value) != len(args):
            raise ConfigError(f"{path}: expected {len(args)} values")
        return tuple(_coerce(v, a, f"{path}[{i}]")
                     for i, (v, a) in enumerate(zip(value, args)))
    if ftype is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected a boolean, got {value!r}")
        return value
    if ftype is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if ftype is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if ftype is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    raise ConfigError(f"{path}: unsupported field type {ftype!r}")


def _build(cls, data: dict, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'}: expected an object, got {data!r}")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    hints = typing.get_type_hints(cls)
    for key in data:
        if key not in fields:
            raise ConfigError(f"{path + key if path else key}: unknown field")
    kwargs = {}
    for name, f in fields.items():
        if name not in data:
            continue
        sub = f"{path}{name}"
        ftype = hints[name]
        if dataclasses.is_dataclass(ftype):
            kwargs[name] = _build(ftype, data[name], sub + ".")
        else:
            kwargs[name] = _coerce(data[name], ftype, sub)
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path.rstrip('.') or 'config'}: {exc}") from exc


def _parse_override(text: str) -> tuple[list[str], object]:
    if "=" not in text:
        raise ConfigError(f"override {text!r} must look like dotted.path=value")
    key, raw = text.split("=", 1)
    keys = [k for k in key.strip().split(".") if k]
    if not keys:
        raise ConfigError(f"override {text!r} has an empty path")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw  # bare strings are fine without quotes
    return keys, value


def _apply_override(data: dict, keys: list[str], value) -> None:
    node = data
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ConfigError(f"override path {'.'.join(keys)} crosses a scalar")
    node[keys[-1]] = value


def _validate(cfg: SimConfig) -> SimConfig:
    def need(cond: bool, path: str, why: str):
        if not cond:
            raise ConfigError(f"{path}: {why}")

    need(cfg.implant.rows > 0 and cfg.implant.cols > 0, "implant.rows", "array must be non-empty")
    need(cfg.implant.spacing_um > 0, "implant.spacing_um", "must be positive")
    need(cfg.implant.axon_mode in ("spiral", "point"), "implant.axon_mode",
         f"must be 'spiral' or 'point', got {cfg.implant.axon_mode!r}")
    need(cfg.percept.width > 0 and cfg.percept.height > 0, "percept.width", "must be positive")
    need(cfg.percept.extent_deg > 0, "percept.extent_deg", "must be positive")
    need(cfg.percept.display_scale > 0, "percept.display_scale", "must be positive")
    need(cfg.temporal.tau_n > 0 and cfg.temporal.tau_b > 0, "temporal.tau_n", "rates must be positive")
    need(cfg.render.frame_px >= 8, "render.frame_px", "frame too small")
    need(0 < cfg.render.fov_deg < 180, "render.fov_deg", "must be in (0, 180)")
    need(cfg.trial.fps > 0, "trial.fps", "must be positive")
    need(cfg.trial.duration_s > 0, "trial.duration_s", "must be positive")
    need(cfg.trial.cooldown_m > 0, "trial.cooldown_m", "must be positive")
    need(cfg.trial.gaze_window_deg <= cfg.render.fov_deg, "trial.gaze_window_deg",
         "gaze window cannot exceed the camera field of view")
    need(cfg.player.speed_m_s >= 0 and cfg.player.turn_deg_s >= 0, "player.speed_m_s",
         "speeds cannot be negative")
    need(cfg.scene.goal_side in ("left", "right", "random"), "scene.goal_side",
         f"must be left/right/random, got {cfg.scene.goal_side!r}")
    need(cfg.batch.trials_per_strategy > 0, "batch.trials_per_strategy", "must be positive")
    for name in cfg.batch.strategies:
        need(name in STRATEGY_KINDS, "batch.strategies", f"unknown strategy {name!r}")
    for name in cfg.strategy.classes:
        need(name in CLASS_IDS, "strategy.classes", f"unknown class {name!r}")
    return cfg


def config_from_dict(data: dict) -> SimConfig:
    return _validate(_build(SimConfig, data, ""))


def load_config(path: str | os.PathLike | None = None,
                overrides: typing.Sequence[str] = ()) -> SimConfig:
    """Assemble a SimConfig from defaults, an optional file, and overrides."""
    if path is None:
        path = os.environ.get("SPVSIM_CONFIG") or None
    data: dict = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {p}")
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {p} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config file {p} must hold a JSON object")
    for text in overrides:
        keys, value = _parse_override(text)
        _apply_override(data, keys, value)
    return config_from_dict(data)


def config_to_dict(cfg: SimConfig) -> dict:
    return dataclasses.asdict(cfg)
