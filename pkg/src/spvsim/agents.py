"""Scripted players for headless trials.

Agents see plan-view state, not the percept: they exist to exercise the
trial protocol deterministically (navigation success, timeouts, collision
bookkeeping), and to replay recorded human input bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .townsim import PlayerState, Scene, TrialState


@dataclass(frozen=True)
class InputCommand:
    """One frame of player input, already normalized to [-1, 1] axes."""
    move: float = 0.0  # forward (+) / backward (-) fraction of walk speed
    turn: float = 0.0  # left (+) / right (-) fraction of the turn rate
    gaze_deg: tuple[float, float] = (0.0, 0.0)  # eye-in-head (yaw, pitch)

    def clipped(self) -> "InputCommand":
        return InputCommand(
            move=float(np.clip(self.move, -1.0, 1.0)),
            turn=float(np.clip(self.turn, -1.0, 1.0)),
            gaze_deg=(float(self.gaze_deg[0]), float(self.gaze_deg[1])),
        )


@dataclass
class AgentContext:
    t: float
    frame: int
    scene: Scene
    player: PlayerState
    trial: TrialState


class Agent(Protocol):
    def decide(self, ctx: AgentContext) -> InputCommand: ...


def _wrap_deg(a: float) -> float:
    return (a + 180.0) % 360.0 - 180.0


def _steer_toward(target: np.ndarray, ctx: AgentContext) -> InputCommand:
    dx = target[0] - ctx.player.pos[0]
    dy = target[1] - ctx.player.pos[1]
    bearing = np.degrees(np.arctan2(dy, dx))
    err = _wrap_deg(bearing - ctx.player.heading_deg)
    turn = float(np.clip(err / 15.0, -1.0, 1.0))
    move = 1.0 if abs(err) < 45.0 else 0.0
    return InputCommand(move=move, turn=turn)


class IdleAgent:
    """Stands at the start doing nothing; trials end by timeout."""

    def decide(self, ctx: AgentContext) -> InputCommand:
        return InputCommand()


class StraightToGoalAgent:
    """Turns toward the assigned goal region's center and walks into it."""

    def decide(self, ctx: AgentContext) -> InputCommand:
        goal = ctx.scene.goals[ctx.trial.goal_side]
        return _steer_toward(np.array([goal.cx, goal.cy]), ctx)


class WaypointAgent:
    """Visits a fixed list of plan-view points, then heads for the goal."""

    def __init__(self, points, arrive_m: float = 0.3):
        self.points = [np.asarray(p, dtype=float) for p in points]
        self.arrive_m = float(arrive_m)
        self._next = 0

    def decide(self, ctx: AgentContext) -> InputCommand:
        while self._next < len(self.points):
            target = self.points[self._next]
            if np.hypot(*(target - ctx.player.pos)) > self.arrive_m:
                return _steer_toward(target, ctx)
            self._next += 1
        goal = ctx.scene.goals.get(ctx.trial.goal_side)
        if goal is None:
            return InputCommand()
        return _steer_toward(np.array([goal.cx, goal.cy]), ctx)


class ReplayAgent:
    """Plays back a recorded command stream, holding the last command."""

    def __init__(self, commands):
        self.commands = [c if isinstance(c, InputCommand) else InputCommand(**c)
                         for c in commands]
        if not self.commands:
            self.commands = [InputCommand()]

    def decide(self, ctx: AgentContext) -> InputCommand:
        return self.commands[min(ctx.frame, len(self.commands) - 1)]
