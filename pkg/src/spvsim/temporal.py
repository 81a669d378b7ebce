"""Temporal dynamics of percept brightness.

Two coupled leaky integrators per pixel model charge accumulation and
perceived brightness::

    dn/dt = -tau_n * n + b_I
    db/dt = -tau_b * b - alpha * n + b_I

with ``b_I`` the spatial model output, ``n`` an accumulated-charge state
that desensitizes the response, and ``b`` the displayed brightness. With
the default constants (tau_n=0.2, tau_b=5, alpha=0.2) a sustained input
fades completely: steady state gives n -> b_I/tau_n and, because
alpha/tau_n == 1, b -> 0.

The coefficients multiply the states as printed above. Some descriptions
of this kind of model read tau as a time constant instead of a rate;
``literal=False`` switches to that reading (dn/dt = (-n + b_I)/tau_n,
db/dt = (-b - alpha*n + b_I)/tau_b).

Integration is forward Euler at the frame period. Both states update from
the pre-step values (simultaneous update); brightness is clamped at zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TemporalParams:
    tau_n: float = 0.2
    tau_b: float = 5.0
    alpha: float = 0.2
    dt: float = 1.0 / 90.0
    literal: bool = True

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.tau_n <= 0 or self.tau_b <= 0:
            raise ValueError("tau_n and tau_b must be positive")
        # forward Euler keeps brightness non-oscillating only below this bound
        if self.tau_b * self.dt >= 1.0:
            raise ValueError("unstable integration step: tau_b * dt must be < 1")


@dataclass
class TemporalState:
    """Per-pixel integrator states; shapes match the percept grid."""

    n: np.ndarray
    b: np.ndarray

    @classmethod
    def zeros(cls, shape: tuple[int, ...]) -> "TemporalState":
        return cls(n=np.zeros(shape), b=np.zeros(shape))


def step_temporal(state: TemporalState, drive: np.ndarray, params: TemporalParams) -> TemporalState:
    """Advance one frame; mutates ``state`` in place and returns it."""
    n, b = state.n, state.b
    if params.literal:
        dn = -params.tau_n * n + drive
        db = -params.tau_b * b - params.alpha * n + drive
    else:
        dn = (-n + drive) / params.tau_n
        db = (-b - params.alpha * n + drive) / params.tau_b
    n += params.dt * dn
    b += params.dt * db
    np.maximum(b, 0.0, out=b)
    return state
