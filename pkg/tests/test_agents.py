"""Scripted player behavior."""

import numpy as np
import pytest

from spvsim.agents import (
    AgentContext,
    IdleAgent,
    InputCommand,
    ReplayAgent,
    StraightToGoalAgent,
    WaypointAgent,
)
from spvsim.townsim import PlayerState, TrialState, parse_layout


def _ctx(pos, heading, frame=0, goal_side="left"):
    scene = parse_layout({
        "id": "t", "bounds": [10, 10], "start": {"pos": [0, -3.4]},
        "goals": {"left": [-2.6, 3.9, 1.8, 0.9]},
    })
    return AgentContext(t=frame / 90.0, frame=frame, scene=scene,
                        player=PlayerState(pos=np.asarray(pos, dtype=float),
                                           heading_deg=heading),
                        trial=TrialState(goal_side=goal_side))


def test_clipped_limits_axes():
    c = InputCommand(move=5.0, turn=-3.0, gaze_deg=(50, -50)).clipped()
    assert c.move == 1.0 and c.turn == -1.0
    assert c.gaze_deg == (50.0, -50.0)  # gaze is clamped downstream


def test_idle_agent_does_nothing():
    assert IdleAgent().decide(_ctx([0, 0], 90.0)) == InputCommand()


def test_straight_agent_heads_for_goal_center():
    # goal center is at (-2.6, 3.9); from the start that bearing is 109.6 deg
    cmd = StraightToGoalAgent().decide(_ctx([0.0, -3.4], 90.0))
    assert cmd.move == 1.0  # error under 45 deg: walk while turning
    assert cmd.turn > 0.0  # goal is to the left

    # facing away: stop and spin
    cmd = StraightToGoalAgent().decide(_ctx([0.0, -3.4], -90.0))
    assert cmd.move == 0.0
    assert abs(cmd.turn) == 1.0


def test_straight_agent_wraps_heading():
    # heading 350 and -10 are the same direction; both see the goal left
    a = StraightToGoalAgent().decide(_ctx([0.0, -3.4], 350.0))
    b = StraightToGoalAgent().decide(_ctx([0.0, -3.4], -10.0))
    assert a.turn == pytest.approx(b.turn)
    assert a.move == b.move


def test_waypoint_agent_advances_through_points():
    agent = WaypointAgent([(0.0, 0.0), (2.0, 0.0)])
    cmd = agent.decide(_ctx([0.0, -3.4], 90.0))
    assert cmd.move == 1.0 and agent._next == 0
    # standing on the first point switches the target to the second
    cmd = agent.decide(_ctx([0.0, 0.0], 0.0))
    assert agent._next == 1
    assert cmd.move == 1.0 and cmd.turn == 0.0  # second point is dead ahead
    # past all points it heads for the goal
    agent.decide(_ctx([2.0, 0.0], 0.0))
    assert agent._next == 2


def test_replay_agent_holds_last_command():
    cmds = [InputCommand(move=1.0), InputCommand(turn=0.5)]
    agent = ReplayAgent(cmds)
    assert agent.decide(_ctx([0, 0], 0, frame=0)) == cmds[0]
    assert agent.decide(_ctx([0, 0], 0, frame=1)) == cmds[1]
    assert agent.decide(_ctx([0, 0], 0, frame=99)) == cmds[1]
    # dict rows (e.g. parsed from a log) are accepted too
    agent = ReplayAgent([{"move": 0.5, "turn": 0.0, "gaze_deg": (1.0, 2.0)}])
    assert agent.decide(_ctx([0, 0], 0)).move == 0.5
    assert ReplayAgent([]).decide(_ctx([0, 0], 0)) == InputCommand()
