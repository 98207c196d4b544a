"""Kinematic bicycle model, control limits, and trajectory rollout."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_WHEELBASE = 2.7  # m

TWO_PI = 2.0 * np.pi


def wrap_angle(a):
    """Wrap angle(s) to (-pi, pi]."""
    return np.pi - (np.pi - np.asarray(a)) % TWO_PI


@dataclass(frozen=True)
class AgentState:
    """Planar pose plus scalar speed of one vehicle at one instant."""

    x: float
    y: float
    heading: float  # rad, wrapped to (-pi, pi]
    speed: float    # m/s, never negative

    def __post_init__(self):
        if not self.speed >= 0.0:
            raise ValueError(f"speed must be >= 0, got {self.speed}")
        object.__setattr__(self, "heading", float(wrap_angle(self.heading)))

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def as_array(self) -> np.ndarray:
        """State vector [x, y, heading, speed]."""
        return np.array([self.x, self.y, self.heading, self.speed])

    @staticmethod
    def from_array(s) -> "AgentState":
        return AgentState(float(s[0]), float(s[1]), float(s[2]), float(s[3]))


@dataclass(frozen=True)
class Control:
    """Constant control over one planning interval: acceleration and steering angle."""

    accel: float  # m/s^2
    steer: float  # rad

    def as_array(self) -> np.ndarray:
        return np.array([self.accel, self.steer])


@dataclass(frozen=True)
class ControlLimits:
    """Component-wise box bounds |a| <= accel, |steer| <= steer."""

    accel: float = 3.0
    steer: float = 0.6

    def contains(self, controls: np.ndarray, tol: float = 1e-9) -> bool:
        u = np.atleast_2d(np.asarray(controls, dtype=float))
        return bool(
            np.all(np.abs(u[:, 0]) <= self.accel + tol)
            and np.all(np.abs(u[:, 1]) <= self.steer + tol)
        )

    def first_violation(self, controls: np.ndarray, tol: float = 1e-9):
        """Index of the first out-of-bounds control, or None."""
        u = np.atleast_2d(np.asarray(controls, dtype=float))
        bad = (np.abs(u[:, 0]) > self.accel + tol) | (np.abs(u[:, 1]) > self.steer + tol)
        idx = np.nonzero(bad)[0]
        return int(idx[0]) if idx.size else None

    def clip(self, controls: np.ndarray) -> np.ndarray:
        u = np.array(controls, dtype=float, copy=True)
        u[..., 0] = np.clip(u[..., 0], -self.accel, self.accel)
        u[..., 1] = np.clip(u[..., 1], -self.steer, self.steer)
        return u


class ControlLimitError(ValueError):
    """A control sequence violates the box limits."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"control at index {index} violates limits")


def step_array(s, u, dt: float, wheelbase: float = DEFAULT_WHEELBASE):
    """One bicycle-model update on raw state vectors.

    Explicit Euler with midpoint speed for the position update; speed is
    clamped at zero (no reverse driving). Supports batched leading axes.
    """
    s = np.asarray(s, dtype=float)
    u = np.asarray(u, dtype=float)
    x, y, psi, v = s[..., 0], s[..., 1], s[..., 2], s[..., 3]
    a, steer = u[..., 0], u[..., 1]
    v1 = np.maximum(0.0, v + a * dt)
    vmid = 0.5 * (v + v1)
    x1 = x + vmid * np.cos(psi) * dt
    y1 = y + vmid * np.sin(psi) * dt
    psi1 = wrap_angle(psi + (v / wheelbase) * np.tan(steer) * dt)
    return np.stack([x1, y1, psi1, v1], axis=-1)


def step(s: AgentState, u: Control, dt: float, wheelbase: float = DEFAULT_WHEELBASE) -> AgentState:
    """One bicycle-model state transition."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    return AgentState.from_array(step_array(s.as_array(), u.as_array(), dt, wheelbase))


def step_jacobians(s, u, dt: float, wheelbase: float = DEFAULT_WHEELBASE):
    """Jacobians (A, B) of step_array at (s, u): A = d s'/d s, B = d s'/d u.

    The speed clamp makes the map piecewise; the clamped branch is handled
    (zero sensitivity of speed to its inputs there).
    """
    x, y, psi, v = (float(c) for c in np.asarray(s, dtype=float))
    a, steer = (float(c) for c in np.asarray(u, dtype=float))
    clamped = (v + a * dt) < 0.0
    dv1_dv = 0.0 if clamped else 1.0
    dv1_da = 0.0 if clamped else dt
    v1 = max(0.0, v + a * dt)
    dvm_dv = 0.5 * (1.0 + dv1_dv)
    dvm_da = 0.5 * dv1_da
    vmid = 0.5 * (v + v1)
    c, si = np.cos(psi), np.sin(psi)
    A = np.array(
        [
            [1.0, 0.0, -vmid * si * dt, dvm_dv * c * dt],
            [0.0, 1.0, vmid * c * dt, dvm_dv * si * dt],
            [0.0, 0.0, 1.0, np.tan(steer) * dt / wheelbase],
            [0.0, 0.0, 0.0, dv1_dv],
        ]
    )
    B = np.array(
        [
            [dvm_da * c * dt, 0.0],
            [dvm_da * si * dt, 0.0],
            [0.0, v * dt / (wheelbase * np.cos(steer) ** 2)],
            [dv1_da, 0.0],
        ]
    )
    return A, B


@dataclass(frozen=True)
class Trajectory:
    """Timestamped state sequence (N+1 states) with the N controls that generated it."""

    start_time: float
    step: float
    states: np.ndarray    # (N+1, 4) rows [x, y, heading, speed]
    controls: np.ndarray  # (N, 2) rows [accel, steer]

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        controls = np.asarray(self.controls, dtype=float).reshape(-1, 2)
        if states.ndim != 2 or states.shape[1] != 4:
            raise ValueError("states must be an (N+1, 4) array")
        if len(states) != len(controls) + 1:
            raise ValueError("need exactly one more state than controls")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "controls", controls)

    @property
    def n_steps(self) -> int:
        return len(self.controls)

    @property
    def positions(self) -> np.ndarray:
        return self.states[:, 0:2]

    @property
    def headings(self) -> np.ndarray:
        return self.states[:, 2]

    @property
    def speeds(self) -> np.ndarray:
        return self.states[:, 3]

    @property
    def times(self) -> np.ndarray:
        return self.start_time + self.step * np.arange(len(self.states))

    def state_at(self, k: int) -> AgentState:
        return AgentState.from_array(self.states[k])

    def validate(self, wheelbase: float = DEFAULT_WHEELBASE, tol: float = 1e-9) -> bool:
        """Check each consecutive state pair against the transition function."""
        for k in range(self.n_steps):
            expect = step_array(self.states[k], self.controls[k], self.step, wheelbase)
            if np.max(np.abs(expect - self.states[k + 1])) > tol:
                return False
        return True


def rollout_array(s0, controls, dt: float, wheelbase: float = DEFAULT_WHEELBASE) -> np.ndarray:
    """Repeated step_array application; returns the (N+1, 4) state array."""
    u = np.asarray(controls, dtype=float).reshape(-1, 2)
    states = np.empty((len(u) + 1, 4))
    states[0] = np.asarray(s0, dtype=float)
    for k in range(len(u)):
        states[k + 1] = step_array(states[k], u[k], dt, wheelbase)
    return states


def rollout_batch(s0, controls, dt: float, wheelbase: float = DEFAULT_WHEELBASE) -> np.ndarray:
    """Vectorized rollout of many control sequences from one start state.

    controls: (M, N, 2) -> returns (M, N+1, 4).
    """
    u = np.asarray(controls, dtype=float)
    m, n, _ = u.shape
    states = np.empty((m, n + 1, 4))
    states[:, 0, :] = np.asarray(s0, dtype=float)
    for k in range(n):
        states[:, k + 1, :] = step_array(states[:, k, :], u[:, k, :], dt, wheelbase)
    return states


def rollout(
    s0: AgentState,
    controls,
    dt: float,
    wheelbase: float = DEFAULT_WHEELBASE,
    limits: ControlLimits | None = None,
    start_time: float = 0.0,
) -> Trajectory:
    """Roll a control sequence into a Trajectory, rejecting out-of-limit controls."""
    u = np.asarray(
        [c.as_array() if isinstance(c, Control) else c for c in controls], dtype=float
    ).reshape(-1, 2)
    if limits is not None:
        bad = limits.first_violation(u)
        if bad is not None:
            raise ControlLimitError(bad)
    states = rollout_array(s0.as_array(), u, dt, wheelbase)
    return Trajectory(start_time=start_time, step=dt, states=states, controls=u)


def rollout_position_jacobian(s0, controls, dt: float, wheelbase: float = DEFAULT_WHEELBASE):
    """States plus d position_k / d u for a flat control vector.

    Returns (states (N+1, 4), jac (N+1, 2, 2N)) where the control vector is
    row-major [a_1, steer_1, a_2, steer_2, ...].
    """
    u = np.asarray(controls, dtype=float).reshape(-1, 2)
    n = len(u)
    states = np.empty((n + 1, 4))
    states[0] = np.asarray(s0, dtype=float)
    dstate = np.zeros((4, 2 * n))  # d state_k / d u_flat, forward accumulated
    jac = np.zeros((n + 1, 2, 2 * n))
    for k in range(n):
        A, B = step_jacobians(states[k], u[k], dt, wheelbase)
        states[k + 1] = step_array(states[k], u[k], dt, wheelbase)
        dstate = A @ dstate
        dstate[:, 2 * k : 2 * k + 2] += B
        jac[k + 1] = dstate[0:2, :]
    return states, jac


def constant_motion_prediction(
    s0: AgentState,
    horizon: int,
    dt: float,
    wheelbase: float = DEFAULT_WHEELBASE,
    steer: float = 0.0,
) -> Trajectory:
    """Zero-acceleration rollout holding the given steering (curvature-preserving)."""
    u = np.tile([0.0, steer], (horizon, 1))
    states = rollout_array(s0.as_array(), u, dt, wheelbase)
    return Trajectory(start_time=0.0, step=dt, states=states, controls=u)
