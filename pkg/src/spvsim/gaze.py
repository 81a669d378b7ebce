"""Gaze-contingent windowing and eye-tracking accuracy statistics.

The stimulated field is a small window inside the camera's field of view;
gaze (yaw, pitch in degrees, positive right/up) slides the window across
the frame and is clamped so the window never leaves it.

The accuracy half of this module reproduces a moving-dot validation:
a dot jumps between four corner positions (dwelling, then traveling),
recorded gaze is resampled on a fixed clock, and angular error is split
into fixation (dot stationary) and pursuit (dot moving) segments. Angular
error uses the small-angle Euclidean approximation in degrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class GazeSample:
    t: float
    yaw_deg: float
    pitch_deg: float


def clamp_gaze(
    gaze_deg: tuple[float, float],
    *,
    fov_deg: float = 60.0,
    window_deg: float = 14.6,
) -> tuple[float, float]:
    """Clamp gaze so the stimulation window stays inside the camera frame."""
    lim = (fov_deg - window_deg) / 2.0
    if lim < 0:
        raise ValueError("window larger than field of view")
    return (float(np.clip(gaze_deg[0], -lim, lim)),
            float(np.clip(gaze_deg[1], -lim, lim)))


def gaze_window(
    gaze_deg: tuple[float, float],
    *,
    fov_deg: float = 60.0,
    frame_px: int = 200,
    window_deg: float = 14.6,
) -> tuple[float, float]:
    """Window center (col, row) in frame pixels for a gaze direction."""
    yaw, pitch = clamp_gaze(gaze_deg, fov_deg=fov_deg, window_deg=window_deg)
    px_per_deg = frame_px / fov_deg
    cx = (frame_px - 1) / 2.0 + yaw * px_per_deg
    cy = (frame_px - 1) / 2.0 - pitch * px_per_deg
    return cx, cy


@dataclass(frozen=True)
class DotSegment:
    t0: float
    t1: float
    kind: str  # "dwell" | "travel"
    p0: tuple[float, float]
    p1: tuple[float, float]


@dataclass
class DotTrajectory:
    """Alternating dwell/travel segments of the validation dot (degrees)."""

    segments: list[DotSegment] = field(default_factory=list)

    @property
    def duration(self) -> float:
        return self.segments[-1].t1 if self.segments else 0.0

    def _segment_at(self, t: float) -> DotSegment:
        for seg in self.segments:
            if t < seg.t1:
                return seg
        return self.segments[-1]

    def position(self, t: float) -> tuple[float, float]:
        seg = self._segment_at(t)
        if seg.kind == "dwell":
            return seg.p0
        u = np.clip((t - seg.t0) / (seg.t1 - seg.t0), 0.0, 1.0)
        return (seg.p0[0] + u * (seg.p1[0] - seg.p0[0]),
                seg.p0[1] + u * (seg.p1[1] - seg.p0[1]))

    def is_dwell(self, t: float) -> bool:
        return self._segment_at(t).kind == "dwell"


def generate_dot_trajectory(
    duration_s: float,
    rng: np.random.Generator,
    *,
    half_extent_deg: tuple[float, float] = (16.0, 12.0),
    dwell_s: float = 1.5,
    travel_s: tuple[float, float] = (2.0, 3.0),
) -> DotTrajectory:
    """Random corner-to-corner dot path.

    Corners sit halfway between the screen center and its edges, i.e. at
    (+-hx/2, +-hy/2) for screen half-extent (hx, hy). The dot dwells
    ``dwell_s`` at a corner, then travels to a different corner over a
    uniform draw from ``travel_s``.
    """
    hx, hy = half_extent_deg
    corners = [(sx * hx / 2.0, sy * hy / 2.0)
               for sx in (-1.0, 1.0) for sy in (-1.0, 1.0)]
    segs: list[DotSegment] = []
    here = int(rng.integers(len(corners)))
    t = 0.0
    while t < duration_s:
        segs.append(DotSegment(t, t + dwell_s, "dwell", corners[here], corners[here]))
        t += dwell_s
        if t >= duration_s:
            break
        choices = [i for i in range(len(corners)) if i != here]
        nxt = choices[int(rng.integers(len(choices)))]
        travel = float(rng.uniform(*travel_s))
        segs.append(DotSegment(t, t + travel, "travel", corners[here], corners[nxt]))
        t += travel
        here = nxt
    return DotTrajectory(segments=segs)


@dataclass(frozen=True)
class GazeAccuracyStats:
    fixation_mean_deg: float
    fixation_sd_deg: float
    pursuit_mean_deg: float
    pursuit_sd_deg: float
    frac_below_5deg: float
    frac_below_3deg: float
    n_fixation: int
    n_pursuit: int

    def as_dict(self) -> dict:
        return {
            "fixation_mean_deg": self.fixation_mean_deg,
            "fixation_sd_deg": self.fixation_sd_deg,
            "pursuit_mean_deg": self.pursuit_mean_deg,
            "pursuit_sd_deg": self.pursuit_sd_deg,
            "frac_below_5deg": self.frac_below_5deg,
            "frac_below_3deg": self.frac_below_3deg,
            "n_fixation": self.n_fixation,
            "n_pursuit": self.n_pursuit,
        }


def _split_errors(errors: np.ndarray, dwell: np.ndarray) -> tuple[float, float, float, float]:
    def mean_sd(x: np.ndarray) -> tuple[float, float]:
        if x.size == 0:
            return float("nan"), float("nan")
        return float(x.mean()), float(x.std())

    fm, fs = mean_sd(errors[dwell])
    pm, ps = mean_sd(errors[~dwell])
    return fm, fs, pm, ps


def gaze_accuracy_stats(
    samples: np.ndarray,
    traj: DotTrajectory,
    rate_hz: float = 10.0,
) -> GazeAccuracyStats:
    """Accuracy statistics of a gaze trace against the dot trajectory.

    ``samples`` is (n, 3): time, yaw, pitch in seconds/degrees, strictly
    increasing in time. The trace is linearly resampled at ``rate_hz``
    over its overlap with the trajectory; each resampled point is
    classified by whether the dot is dwelling at that instant. Fractions
    below 5/3 degrees are taken over all resampled points. SDs are
    population SDs.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 3 or samples.shape[0] < 2:
        raise ValueError("samples must be (n>=2, 3): t, yaw, pitch")
    ts = samples[:, 0]
    if np.any(np.diff(ts) <= 0):
        raise ValueError("sample times must be strictly increasing")

    t0 = max(float(ts[0]), 0.0)
    t1 = min(float(ts[-1]), traj.duration)
    if t1 <= t0:
        raise ValueError("gaze trace does not overlap the trajectory")
    marks = np.arange(t0, t1 + 1e-9, 1.0 / rate_hz)

    yaw = np.interp(marks, ts, samples[:, 1])
    pitch = np.interp(marks, ts, samples[:, 2])
    dots = np.array([traj.position(t) for t in marks])
    errors = np.hypot(yaw - dots[:, 0], pitch - dots[:, 1])
    dwell = np.array([traj.is_dwell(t) for t in marks])

    fm, fs, pm, ps = _split_errors(errors, dwell)
    return GazeAccuracyStats(
        fixation_mean_deg=fm,
        fixation_sd_deg=fs,
        pursuit_mean_deg=pm,
        pursuit_sd_deg=ps,
        frac_below_5deg=float((errors < 5.0).mean()),
        frac_below_3deg=float((errors < 3.0).mean()),
        n_fixation=int(dwell.sum()),
        n_pursuit=int((~dwell).sum()),
    )
