"""Two-state temporal dynamics: fading, steady state, integrator accuracy."""

import numpy as np
import pytest

from oracles import temporal_closed_form, temporal_reference
from spvsim.temporal import TemporalParams, TemporalState, step_temporal

P = TemporalParams()  # tau_n=0.2, tau_b=5, alpha=0.2, dt=1/90


def run_constant(params, u, n_frames):
    state = TemporalState.zeros(())
    ns = np.empty(n_frames)
    bs = np.empty(n_frames)
    drive = np.asarray(u, dtype=float)
    for k in range(n_frames):
        step_temporal(state, drive, params)
        ns[k] = state.n
        bs[k] = state.b
    return ns, bs


def test_matches_reference_integrator_at_one_substep():
    """With a single substep the oracle is the same scheme, bit for bit."""
    rng = np.random.default_rng(2)
    drives = rng.uniform(0.0, 1.0, 200)
    state = TemporalState.zeros(())
    got_n = np.empty(200)
    got_b = np.empty(200)
    for k, u in enumerate(drives):
        step_temporal(state, np.asarray(u), P)
        got_n[k] = state.n
        got_b[k] = state.b
    ref_n, ref_b = temporal_reference(drives, P.tau_n, P.tau_b, P.alpha,
                                      P.dt, substeps=1)
    assert np.allclose(got_n, ref_n, atol=1e-14)
    assert np.allclose(got_b, ref_b, atol=1e-14)


def test_single_step_decay_factors_are_exact():
    state = TemporalState(n=np.asarray(1.0), b=np.asarray(0.0))
    step_temporal(state, np.asarray(0.0), P)
    assert state.n == pytest.approx(1.0 - P.tau_n * P.dt, abs=1e-15)
    state = TemporalState(n=np.asarray(0.0), b=np.asarray(1.0))
    step_temporal(state, np.asarray(0.0), P)
    assert state.b == pytest.approx(1.0 - P.tau_b * P.dt, abs=1e-15)


def test_steady_state_full_fading():
    """Constant drive u: n settles at u / tau_n while brightness fades out."""
    ns, bs = run_constant(P, 1.0, 90 * 60)
    assert ns[-1] == pytest.approx(1.0 / P.tau_n, abs=1e-3)
    assert bs[-1] < 1e-3
    # accumulation term alpha * n exactly cancels the drive at steady state
    assert P.alpha * ns[-1] == pytest.approx(1.0, abs=1e-3)


def test_brightness_peaks_then_fades_monotonically():
    ns, bs = run_constant(P, 1.0, 90 * 30)
    k_peak = int(np.argmax(bs))
    t_peak = (k_peak + 1) * P.dt
    # frozen from the closed form: peak near 0.1756 at about 0.656 s
    assert t_peak == pytest.approx(0.656, abs=0.02)
    assert bs[k_peak] == pytest.approx(0.17556, abs=0.003)
    assert (np.diff(bs[k_peak:]) <= 1e-12).all()
    assert bs[-1] <= 0.01 * bs[k_peak]


def test_euler_error_against_closed_form_is_first_order():
    """Frame-rate Euler carries a small bias that shrinks linearly with dt."""
    t = np.arange(1, 90 + 1) * P.dt
    _, exact_b = temporal_closed_form(1.0, t, P.tau_n, P.tau_b, P.alpha)
    _, got_b = run_constant(P, 1.0, 90)
    coarse_err = np.abs(got_b - exact_b).max()
    # measured once and frozen: ~2.1e-3 at dt=1/90
    assert 1e-3 < coarse_err < 3e-3

    fine = TemporalParams(dt=P.dt / 10)
    t10 = np.arange(1, 900 + 1) * fine.dt
    _, exact10 = temporal_closed_form(1.0, t10, P.tau_n, P.tau_b, P.alpha)
    _, got10 = run_constant(fine, 1.0, 900)
    fine_err = np.abs(got10 - exact10).max()
    assert fine_err < coarse_err / 8.0  # first-order convergence


def test_literal_flag_switches_rate_reading():
    """Non-literal reading treats tau as a time constant, not a rate."""
    loose = TemporalParams(literal=False, tau_b=0.5)
    ns, _ = run_constant(loose, 1.0, 90 * 10)
    assert ns[-1] == pytest.approx(1.0, abs=1e-3)  # n -> u, not u / tau_n


def test_brightness_never_goes_negative():
    state = TemporalState(n=np.asarray(50.0), b=np.asarray(0.0))
    for _ in range(200):
        step_temporal(state, np.asarray(0.0), P)
        assert state.b >= 0.0


def test_array_state_matches_scalar_runs():
    rng = np.random.default_rng(9)
    drives = rng.uniform(0.0, 2.0, (40, 2, 3))
    state = TemporalState.zeros((2, 3))
    for k in range(40):
        step_temporal(state, drives[k], P)
    for i in range(2):
        for j in range(3):
            ref_n, ref_b = temporal_reference(drives[:, i, j], P.tau_n, P.tau_b,
                                              P.alpha, P.dt, substeps=1)
            assert state.n[i, j] == pytest.approx(ref_n[-1], abs=1e-12)
            assert state.b[i, j] == pytest.approx(ref_b[-1], abs=1e-12)


def test_unstable_step_is_rejected():
    with pytest.raises(ValueError):
        TemporalParams(tau_b=5.0, dt=0.21)
    with pytest.raises(ValueError):
        TemporalParams(dt=0.0)
    with pytest.raises(ValueError):
        TemporalParams(tau_n=-1.0)
