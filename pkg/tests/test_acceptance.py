"""Shipped-guarantee suite: one test per engine guarantee.

``pytest -v tests/test_acceptance.py`` prints a single pass/fail line per
guarantee (c1..c9).  Every tolerance is pinned here, not imported, so a
regression cannot loosen a bound silently.

Known shortfall: test_c2 asserts a 1e-3 accuracy target for the frame-rate
Euler integrator against a fine-step reference.  At 90 Hz the first-order
error of the brightness ODE sits near 2.1e-3, so the final clause of c2
fails by design until the integrator is replaced or the target is revised.
The measured error is printed in the failure report.
"""

import time

import numpy as np
import pytest

from oracles import temporal_closed_form, temporal_reference, percept_brute_force
from spvsim.agents import IdleAgent, StraightToGoalAgent
from spvsim.config import load_config
from spvsim.frames import LabeledFrame, StrategyConfig, active_class, apply_strategy
from spvsim.gaze import clamp_gaze, gaze_accuracy_stats, generate_dot_trajectory
from spvsim.pipeline import Engine, bench, run_batch, run_trial
from spvsim.raster import checkerboard_mask
from spvsim.retina import (
    AxonMapParams,
    build_array,
    build_kernel,
    generate_axon_paths,
    make_grid,
    spatial_percept,
)
from spvsim.temporal import TemporalParams, TemporalState, step_temporal
from spvsim.townsim import detect_collisions, parse_layout


# --- c1: factored axon-map evaluation == direct model definition -------------

def test_c1_axon_map_oracle_equivalence():
    """Kernel gemv + gathered max equals the per-pixel model definition.

    16x16 percept grid, 3x3 array at 400 um, spiral axons, 100 random
    activation vectors; max abs difference must stay within 1e-6 and the
    whole comparison must finish in under 10 s.
    """
    t0 = time.perf_counter()
    params = AxonMapParams(rho_um=200.0, lambda_um=400.0, um_per_degree=280.0)
    array = build_array(3, 3, spacing_um=400.0)
    grid = make_grid(16, 16, extent_deg=8.0, um_per_degree=280.0)
    paths = generate_axon_paths(grid, params, mode="spiral")
    kernel = build_kernel(array, paths, params)

    rng = np.random.default_rng(2024)
    worst = 0.0
    for k in range(100):
        if k == 0:
            acts = np.zeros(array.n_electrodes)
        elif k == 1:
            acts = np.ones(array.n_electrodes)
        else:
            acts = rng.uniform(0.0, 1.0, array.n_electrodes)
        fast = spatial_percept(acts, kernel, paths, grid).values
        slow = percept_brute_force(acts, array, paths, grid,
                                   params.rho_um, params.lambda_um)
        worst = max(worst, float(np.abs(fast - slow).max()))
    elapsed = time.perf_counter() - t0

    print(f"c1: max |factored - direct| = {worst:.3e} over 100 vectors "
          f"({elapsed:.2f} s)")
    assert worst <= 1e-6
    assert elapsed < 10.0


# --- c2: temporal fading under sustained drive --------------------------------

def test_c2_temporal_fading_reproduction():
    """Constant unit drive: rise, peak, monotone fade, near-zero by 30 s.

    The last clause compares the 90 Hz Euler trajectory against a fine-step
    reference (held-drive Euler at ~1e-4 s) and asserts a 1e-3 max abs
    error.  That target is not reachable at dt=1/90 (measured ~2.1e-3), so
    this test currently fails there, after the fading properties themselves
    have been verified.
    """
    fps = 90.0
    dt = 1.0 / fps
    n_frames = int(round(30.0 * fps))
    params = TemporalParams(tau_n=0.2, tau_b=5.0, alpha=0.2, dt=dt)
    state = TemporalState.zeros((1,))
    drive = np.ones(1)
    b_traj = np.empty(n_frames)
    for k in range(n_frames):
        step_temporal(state, drive, params)
        b_traj[k] = state.b[0]

    peak_idx = int(np.argmax(b_traj))
    peak = float(b_traj[peak_idx])
    t_peak = (peak_idx + 1) * dt
    # closed form peaks at t = ln(tau_b/tau_n)/(tau_b - tau_n) ~ 0.67 s
    assert 0.4 < t_peak < 0.9
    assert peak == pytest.approx(0.175, abs=0.01)
    after = b_traj[peak_idx:]
    assert np.all(np.diff(after) <= 1e-12), "decay after the peak is monotone"
    assert b_traj[-1] < 0.01 * peak, "faded below 1% of peak within 30 s"

    # reference: same held drive, 112 substeps per frame (~9.9e-5 s steps)
    ts = (np.arange(n_frames) + 1) * dt
    _, b_ref = temporal_reference(np.ones(n_frames), 0.2, 5.0, 0.2, dt,
                                  substeps=112)
    _, b_exact = temporal_closed_form(1.0, ts, 0.2, 5.0, 0.2)
    oracle_gap = float(np.abs(b_ref - b_exact).max())
    assert oracle_gap <= 5e-5, "reference integrator agrees with closed form"

    err = float(np.abs(b_traj - b_ref).max())
    print(f"c2: max |euler(90 Hz) - reference| = {err:.3e} "
          f"(reference vs closed form {oracle_gap:.1e})")
    assert err <= 1e-3, (
        f"frame-rate Euler misses the 1e-3 accuracy target: measured {err:.3e}")


# --- c3: checkerboard raster safety -------------------------------------------

def test_c3_checkerboard_safety():
    """10,000 consecutive frames: no 4-adjacent pair, full 2-frame coverage."""
    array = build_array(10, 10, spacing_um=400.0)
    rows, cols = array.electrode_rc()
    grid = np.zeros((10, 10), dtype=bool)

    t0 = time.perf_counter()
    prev = checkerboard_mask(array, 0)
    for k in range(10_000):
        mask = prev if k == 0 else checkerboard_mask(array, k)
        grid[:] = False
        grid[rows, cols] = mask
        assert not (grid[:, 1:] & grid[:, :-1]).any()
        assert not (grid[1:, :] & grid[:-1, :]).any()
        if k > 0:
            assert (mask | prev).all()
            prev = mask
    elapsed = time.perf_counter() - t0

    print(f"c3: 10,000 frames checked in {elapsed:.3f} s")
    assert elapsed < 1.0


# --- c4: semantic raster slot timing ------------------------------------------

def test_c4_semantic_raster_timing():
    """At 90 Hz with a 200 ms dwell, slots are 18 frames, the cycle 54."""
    cfg = StrategyConfig(kind="SemanticRaster")
    assert cfg.dwell_s == 0.2 and len(cfg.classes) == 3
    fps = 90.0
    for k in range(540):  # ten full cycles
        t = k / fps
        expected = cfg.classes[(k // 18) % 3]
        assert active_class(cfg, t) == expected, f"frame {k}"
        assert active_class(cfg, (k + 54) / fps) == active_class(cfg, t)
    # slot boundaries land exactly on multiples of 18 frames
    changes = [k for k in range(1, 540)
               if active_class(cfg, k / fps) != active_class(cfg, (k - 1) / fps)]
    assert changes == [k for k in range(18, 540, 18)]


# --- c5: batch determinism -----------------------------------------------------

def test_c5_pipeline_determinism():
    """Two identically seeded batch runs are bit-identical.

    Full default engine (10x10 implant, 128x128 percept, spiral axons),
    trials shortened to 2 s so the two runs cover 1,080 frames in total.
    Every frame's quantized percept bytes enter a per-trial digest, so
    equal digests mean bit-identical frame dumps; the rest of the log
    (layouts, seeds, metrics) is compared directly.
    """
    cfg = load_config(overrides=["trial.duration_s=2"])
    engine = Engine(cfg)
    log_a = run_batch(cfg, engine=engine)
    log_b = run_batch(cfg, engine=engine)

    frames_total = sum(r["frames"] for r in log_a["rows"])
    assert frames_total >= 1000
    assert [r["percept_digest"] for r in log_a["rows"]] == \
           [r["percept_digest"] for r in log_b["rows"]]
    assert log_a == log_b
    print(f"c5: {frames_total} frames per run, logs identical")


# --- c6: trial protocol --------------------------------------------------------

BIKE_INTERCEPT = {
    "id": "intercept",
    "bounds": [10, 10],
    "start": {"pos": [0, -3.4], "heading_deg": 90},
    "goals": {"left": [-2.6, 3.9, 1.8, 0.9]},
    "walls": False,
    "agents": [
        {"name": "Cyclist", "class": "bicycle",
         "waypoints": [[-4.5, -3.4], [4.5, -3.4]],
         "speed": [3, 3], "delay": [0.2, 0.2], "radius": 0.4, "height": 1.5},
    ],
}


def test_c6_trial_protocol():
    """Success, bike_crash, and timeout terminations plus cooldown counts."""
    cfg = load_config(overrides=[
        "percept.width=48", "percept.height=48", "percept.extent_deg=16",
        "implant.rows=3", "implant.cols=3", "implant.spacing_um=500",
        "render.frame_px=48",
    ])
    engine = Engine(cfg)

    walked = run_trial(engine, StraightToGoalAgent(), layout="empty",
                       goal_side="left")
    assert walked.outcome == "success"
    assert walked.metrics["completion_time"] < 50.0
    assert walked.metrics["collisions_total"] == 0

    crashed = run_trial(engine, IdleAgent(), layout=BIKE_INTERCEPT,
                        goal_side="left", rng=np.random.default_rng(0))
    assert crashed.outcome == "bike_crash"
    t_crash = crashed.frames / cfg.trial.fps
    assert 1.0 < t_crash < 2.5  # cyclist reaches the start around 1.5 s

    idled = run_trial(engine, IdleAgent(), layout="empty", goal_side="left")
    assert idled.outcome == "timeout"
    assert idled.frames == 4500
    assert idled.frames / cfg.trial.fps == 50.0  # exact, not approximate
    assert idled.metrics["completion_time"] is None

    # cooldown arithmetic: touch -> 1 event; two seconds of continued
    # contact -> still 1; back off 0.1 m and re-touch -> still 1; back off
    # 0.3 m and re-touch -> a second event
    scene = parse_layout({
        "id": "pad", "bounds": [10, 10], "start": {"pos": [0, -3.4]},
        "goals": {"left": [-2.6, 3.9, 1.8, 0.9]},
        "statics": [{"name": "Fountain", "class": "structure",
                     "circle": [0, 0, 1.0], "height": 1.4}],
    })
    pending = {}
    touch = np.array([0.0, -1.1])
    counts = [len(detect_collisions(scene, [], touch, 0.0, pending))]
    for k in range(180):  # 2 s of overlap at 90 Hz
        counts.append(len(detect_collisions(scene, [], touch,
                                            (k + 1) / 90.0, pending)))
    assert sum(counts) == 1

    detect_collisions(scene, [], np.array([0.0, -1.2]), 3.0, pending)  # 0.1 m
    again = detect_collisions(scene, [], touch, 3.1, pending)
    assert len(again) == 0  # cooldown still armed

    detect_collisions(scene, [], np.array([0.0, -1.4]), 4.0, pending)  # 0.3 m
    fresh = detect_collisions(scene, [], touch, 4.1, pending)
    assert len(fresh) == 1
    print(f"c6: success at {walked.metrics['completion_time']:.2f} s, "
          f"crash at {t_crash:.2f} s, timeout at frame {idled.frames}")


# --- c7: gaze accuracy statistics ---------------------------------------------

def test_c7_gaze_accuracy_stats():
    """Constructed traces give exact statistics; dot-tracking runs end to end."""
    # half the resampled marks at 4 deg error, half at 6 deg
    traj = generate_dot_trajectory(60.0, np.random.default_rng(5))
    ts = np.round(np.arange(100) * 0.1, 10)
    samples = np.stack([ts, np.where(ts < 5.0, 4.0, 6.0), np.zeros(100)], axis=1)
    dots = np.array([traj.position(t) for t in ts])
    samples[:, 1] += dots[:, 0]
    samples[:, 2] += dots[:, 1]
    stats = gaze_accuracy_stats(samples, traj, rate_hz=10.0)
    assert stats.frac_below_5deg == 0.5
    assert stats.frac_below_3deg == 0.0
    assert stats.n_fixation + stats.n_pursuit == 100

    # synthetic observer: dot position plus a constant 2 deg yaw offset,
    # sampled at 60 Hz and resampled at the analysis rate of 10 Hz
    traj = generate_dot_trajectory(30.0, np.random.default_rng(11))
    ts = np.linspace(0.0, 30.0, 1801)
    gaze = np.array([traj.position(t) for t in ts])
    gaze[:, 0] += 2.0
    stats = gaze_accuracy_stats(np.column_stack([ts, gaze]), traj, rate_hz=10.0)
    assert stats.n_fixation > 0 and stats.n_pursuit > 0
    assert stats.n_fixation + stats.n_pursuit == 301
    assert stats.fixation_mean_deg == pytest.approx(2.0, abs=0.1)
    assert stats.pursuit_mean_deg == pytest.approx(2.0, abs=0.1)
    assert stats.frac_below_5deg == 1.0

    # gaze commands entering the pipeline stay inside the camera's view
    assert clamp_gaze((30.0, -40.0)) == pytest.approx((22.7, -22.7))
    print(f"c7: dot tracking split {stats.n_fixation} fixation / "
          f"{stats.n_pursuit} pursuit marks")


# --- c8: frame budget ----------------------------------------------------------

def test_c8_frame_budget():
    """Default engine sustains the 90 Hz frame rate with headroom."""
    report = bench(load_config(), n_frames=270)
    fps = report["fps"]
    print(f"c8: {fps:.1f} fps ({report['ms_per_frame']:.2f} ms/frame), "
          f"margin {fps - 90.0:+.1f} fps over the 90 fps target")
    assert report["meets_target"]
    assert fps >= 90.0


# --- c9: strategy output structure ---------------------------------------------

def test_c9_strategy_subset_property():
    """Raster output support stays inside the all-class edges support.

    1,000 random labeled frames; for each, the cycling single-class
    strategy must light only pixels that the all-class strategy also
    lights, and the full-frame control strategy must not depend on time.
    """
    rng = np.random.default_rng(99)
    edges_cfg = StrategyConfig(kind="SemanticEdges")
    raster_cfg = StrategyConfig(kind="SemanticRaster")
    control_cfg = StrategyConfig(kind="Control")
    for _ in range(1000):
        frame = LabeledFrame(
            intensity=rng.random((48, 48)),
            labels=rng.integers(0, 6, (48, 48)).astype(np.uint8),
        )
        t = float(rng.uniform(0.0, 2.0))
        raster = apply_strategy(frame, raster_cfg, t)
        edges = apply_strategy(frame, edges_cfg, t)
        assert not np.any((raster > 0.0) & (edges == 0.0))
        c0 = apply_strategy(frame, control_cfg, 0.0)
        c1 = apply_strategy(frame, control_cfg, t + 17.3)
        assert np.array_equal(c0, c1)
