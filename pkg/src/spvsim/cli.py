"""Command-line entry points.

Exit codes: 0 on success, 2 for configuration or usage errors, 3 for
runtime failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, load_config
from .frameio import montage, percept_to_u8, write_json, write_pgm, write_trials_csv
from .gaze import gaze_accuracy_stats, generate_dot_trajectory
from .pipeline import Engine, TrialRunner, bench, run_batch
from .agents import StraightToGoalAgent
from .townsim import SceneError, builtin_layouts, load_scene


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="FILE", default=None,
                   help="JSON config file (default: $SPVSIM_CONFIG if set)")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="PATH=VALUE",
                   help="override a config field, e.g. --set trial.fps=60")


def _load(args) -> "SimConfig":  # noqa: F821 (kept as a doc hint)
    return load_config(args.config, args.overrides)


def _cmd_run(args) -> int:
    cfg = _load(args)
    if args.seed is not None:
        cfg = load_config(args.config, [*args.overrides,
                                        f"batch.seed={args.seed}"])
    out_dir = Path(args.out or cfg.io.out_dir)

    dump_state = {"count": 0}

    def hook_factory(block, kind, trial_i):
        if not cfg.io.dump_frames:
            return None
        engine_scale = cfg.percept.display_scale

        def hook(runner, out):
            if out.frame % cfg.io.dump_every == 0:
                img = percept_to_u8(out.percept, engine_scale)
                write_pgm(out_dir / "frames" /
                          f"b{block}_{kind}_t{trial_i}_f{out.frame:05d}.pgm", img)
                dump_state["count"] += 1
        return hook

    log = run_batch(cfg, frame_hook_factory=hook_factory)
    write_trials_csv(out_dir / "trials.csv", log["rows"])
    write_json(out_dir / "summary.json", {
        "seed": log["seed"], "order": log["order"], "summary": log["summary"],
    })
    print(json.dumps(log["summary"], indent=2, sort_keys=True))
    print(f"wrote {out_dir / 'trials.csv'} ({len(log['rows'])} trials, "
          f"{dump_state['count']} frame dumps)")
    return 0


def _cmd_serve(args) -> int:
    cfg = _load(args)
    overrides = list(args.overrides)
    if args.host:
        overrides.append(f"service.host={args.host}")
    if args.port:
        overrides.append(f"service.port={args.port}")
    if args.no_realtime:
        overrides.append("service.realtime=false")
    if overrides != args.overrides:
        cfg = load_config(args.config, overrides)

    import uvicorn

    from .service import create_app
    print(f"building engine ({cfg.implant.rows}x{cfg.implant.cols} array, "
          f"{cfg.percept.width}x{cfg.percept.height} percept)...")
    app = create_app(cfg)
    uvicorn.run(app, host=cfg.service.host, port=cfg.service.port,
                log_level="info")
    return 0


def _cmd_render(args) -> int:
    cfg = _load(args)
    engine = Engine(cfg)
    rng = np.random.default_rng(args.seed)
    out_dir = Path(args.out or cfg.io.out_dir)
    frames: list[np.ndarray] = []
    cameras: list[np.ndarray] = []
    stride = max(args.frames // max(args.tiles, 1), 1)

    scene, states = load_scene(args.layout, rng)
    runner = TrialRunner(engine, scene, states, goal_side=args.goal)
    agent = StraightToGoalAgent()
    while not runner.trial.done and runner.frame < args.frames:
        cmd = agent.decide(runner.context()).clipped()
        keep = runner.frame % stride == 0 and len(frames) < args.tiles
        out = runner.step(cmd, keep_camera=keep)
        if keep:
            frames.append(engine.percept_u8(out.percept))
            cameras.append(np.round(out.camera.intensity * 255).astype(np.uint8))

    percept_path = write_pgm(out_dir / f"{scene.id}_percept.pgm",
                             montage(frames))
    print(f"wrote {percept_path}")
    if cameras:
        camera_path = write_pgm(out_dir / f"{scene.id}_camera.pgm",
                                montage(cameras))
        print(f"wrote {camera_path}")
    return 0


def _cmd_gaze_stats(args) -> int:
    rng = np.random.default_rng(args.seed)
    traj = generate_dot_trajectory(args.duration, rng,
                                   half_extent_deg=tuple(args.half_extent))
    if args.samples:
        rows = []
        with open(args.samples, newline="") as fh:
            for row in csv.DictReader(fh):
                rows.append((float(row["t"]), float(row["yaw_deg"]),
                             float(row["pitch_deg"])))
        samples = np.asarray(rows)
    else:
        # synthesize a noisy tracker following the same dot
        t = np.arange(0.0, traj.duration, 1.0 / args.rate)
        noise_rng = np.random.default_rng(args.seed + 1)
        pts = np.array([traj.position(ti) for ti in t])
        noisy = pts + noise_rng.normal(0.0, args.noise_deg, pts.shape)
        samples = np.column_stack([t, noisy])
    stats = gaze_accuracy_stats(samples, traj, rate_hz=args.rate)
    print(json.dumps(stats.as_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_bench(args) -> int:
    cfg = _load(args)
    report = bench(cfg, n_frames=args.frames, layout=args.layout)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def _cmd_layouts(args) -> int:
    for name in builtin_layouts():
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spvsim",
        description="simulated prosthetic vision in a town-square wayfinding task")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scripted trial batch and write logs")
    _add_config_args(p)
    p.add_argument("--seed", type=int, default=None, help="batch seed")
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("serve", help="serve the interactive websocket session")
    _add_config_args(p)
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--no-realtime", action="store_true",
                   help="stream frames without wall-clock pacing")
    p.set_defaults(fn=_cmd_serve)

    p = sub.add_parser("render", help="dump percept and camera montages")
    _add_config_args(p)
    p.add_argument("--layout", default="plaza_a")
    p.add_argument("--goal", default="left", choices=("left", "right"))
    p.add_argument("--frames", type=int, default=900)
    p.add_argument("--tiles", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_render)

    p = sub.add_parser("gaze-stats", help="dot-following gaze accuracy report")
    p.add_argument("--samples", default=None,
                   help="CSV with t,yaw_deg,pitch_deg columns; synthesized if omitted")
    p.add_argument("--seed", type=int, default=0, help="dot trajectory seed")
    p.add_argument("--duration", type=float, default=60.0)
    p.add_argument("--rate", type=float, default=10.0, help="sample rate, Hz")
    p.add_argument("--noise-deg", type=float, default=1.0,
                   help="tracker noise for synthesized samples")
    p.add_argument("--half-extent", type=float, nargs=2, default=(16.0, 12.0),
                   metavar=("X", "Y"))
    p.set_defaults(fn=_cmd_gaze_stats)

    p = sub.add_parser("bench", help="measure full-pipeline frame rate")
    _add_config_args(p)
    p.add_argument("--frames", type=int, default=270)
    p.add_argument("--layout", default="plaza_a")
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("layouts", help="list built-in layouts")
    p.set_defaults(fn=_cmd_layouts)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, SceneError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
