"""Trial protocol: outcome state machine and performance metrics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .scene import CollisionEvent, Scene

TRIAL_DURATION_S = 50.0
COUNTDOWN_S = 10.0

OUTCOMES = ("success", "timeout", "bike_crash")


@dataclass
class TrialState:
    goal_side: str
    duration_s: float = TRIAL_DURATION_S
    countdown_s: float = COUNTDOWN_S
    status: str = "running"
    elapsed: float = 0.0
    completion_time: float | None = None
    countdown_on: bool = False
    events: list[CollisionEvent] = field(default_factory=list)

    @property
    def done(self) -> bool:
        return self.status != "running"

    @property
    def remaining(self) -> float:
        return max(self.duration_s - self.elapsed, 0.0)


def trial_update(trial: TrialState, scene: Scene, player_pos: np.ndarray,
                 events: list[CollisionEvent], elapsed: float) -> TrialState:
    """Fold one frame's events into the trial.

    Outcome precedence within a frame: a bicycle contact ends the trial
    before a goal entry, which ends it before the time limit.
    """
    if trial.done:
        return trial
    trial.elapsed = elapsed
    trial.events.extend(events)

    if any(ev.class_name == "bicycle" for ev in events):
        trial.status = "bike_crash"
        return trial

    goal = scene.goals.get(trial.goal_side)
    if goal is not None and goal.contains(player_pos):
        trial.status = "success"
        trial.completion_time = elapsed
        return trial

    if elapsed >= trial.duration_s:
        trial.status = "timeout"
        return trial

    trial.countdown_on = trial.remaining <= trial.countdown_s
    return trial


@dataclass(frozen=True)
class TrialMetrics:
    outcome: str
    completion_time: float | None
    collisions_total: int
    collisions_stationary: int
    collisions_moving: int

    @property
    def success(self) -> bool:
        return self.outcome == "success"

    @property
    def collision_free(self) -> bool:
        return self.collisions_total == 0

    def as_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "completion_time": self.completion_time,
            "collisions_total": self.collisions_total,
            "collisions_stationary": self.collisions_stationary,
            "collisions_moving": self.collisions_moving,
        }


def trial_metrics(trial: TrialState) -> TrialMetrics:
    """Summarize a finished (or abandoned) trial.

    Stationary counts cover fixed obstacles and standing pedestrians; moving
    counts cover path-following agents, the terminal bicycle contact included.
    """
    moving = sum(1 for ev in trial.events if ev.moving)
    stationary = len(trial.events) - moving
    return TrialMetrics(
        outcome=trial.status,
        completion_time=trial.completion_time,
        collisions_total=len(trial.events),
        collisions_stationary=stationary,
        collisions_moving=moving,
    )


def metrics_summary(metrics: list[TrialMetrics]) -> dict:
    """Aggregate over a block of trials, as reported per condition."""
    n = len(metrics)
    if n == 0:
        return {"n_trials": 0}
    successes = [m for m in metrics if m.success]
    return {
        "n_trials": n,
        "success_rate": len(successes) / n,
        "collision_free_rate": sum(m.collision_free for m in metrics) / n,
        "mean_collisions": float(np.mean([m.collisions_total for m in metrics])),
        "mean_collisions_stationary": float(np.mean([m.collisions_stationary for m in metrics])),
        "mean_collisions_moving": float(np.mean([m.collisions_moving for m in metrics])),
        "mean_completion_time": (float(np.mean([m.completion_time for m in successes]))
                                 if successes else None),
        "outcomes": {k: sum(m.outcome == k for m in metrics) for k in OUTCOMES},
    }
