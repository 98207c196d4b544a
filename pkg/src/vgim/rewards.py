"""Progress/deviation and conflict-mitigation rewards, z-scoring, and the IPV-weighted utility."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import ControlLimits, Trajectory, rollout_batch
from .scenario import ReferencePath, project_many

HALF_PI = np.pi / 2
STD_FLOOR = 1e-6


@dataclass(frozen=True)
class Ipv:
    """Social preference angle; positive leans cooperative, negative competitive."""

    theta: float
    sigma: float | None = None  # optional estimate uncertainty

    def __post_init__(self):
        if not -HALF_PI <= self.theta <= HALF_PI:
            raise ValueError(f"theta must lie in [-pi/2, pi/2], got {self.theta}")

    @property
    def weights(self) -> tuple[float, float]:
        """(individual, group) reward weights (cos theta, sin theta)."""
        return float(np.cos(self.theta)), float(np.sin(self.theta))


@dataclass(frozen=True)
class NormStats:
    mean: float
    std: float

    def __post_init__(self):
        if not self.std > 0:
            raise ValueError("std must be positive")

    def z(self, r: float) -> float:
        return (r - self.mean) / self.std


@dataclass(frozen=True)
class UtilityParams:
    """Static utility parameters: deviation weight and the frozen z-score stats."""

    ind: NormStats
    grp: NormStats
    alpha: float = 0.5

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")


def path_progress_and_deviations(traj_positions: np.ndarray, path: ReferencePath):
    """(progress from x^0 to x^N along the path, per-state deviations)."""
    _, s, dev, _, _ = project_many(path, traj_positions)
    return float(s[-1] - s[0]), dev


def smooth_deviation(dev: np.ndarray, band: float):
    """C1 regularization of the deviation magnitude near zero.

    Exact for dev >= band; quadratic below, so the gradient vanishes smoothly
    on the path instead of jumping between unit normals. Returns (value,
    d value / d dev).
    """
    dev = np.asarray(dev, dtype=float)
    inside = dev < band
    val = np.where(inside, dev * dev / (2.0 * band) + 0.5 * band, dev)
    slope = np.where(inside, dev / band, 1.0)
    return val, slope


def individual_reward_from_positions(pos: np.ndarray, path: ReferencePath, alpha: float) -> float:
    tau, dev = path_progress_and_deviations(pos, path)
    return tau - alpha * float(np.sum(dev[1:]))


def individual_reward(traj: Trajectory, path: ReferencePath, alpha: float) -> float:
    """Progress along the reference path minus weighted path deviation (steps 1..N)."""
    return individual_reward_from_positions(traj.positions, path, alpha)


def individual_reward_position_grad(pos: np.ndarray, path: ReferencePath, alpha: float) -> np.ndarray:
    """d R_I / d x^n for each state position; (N+1, 2)."""
    pts = np.asarray(pos, dtype=float)
    _, _, dev, tangent, normal_dir = project_many(path, pts)
    grad = np.zeros_like(pts)
    grad[-1] += tangent[-1]
    grad[1:] -= alpha * normal_dir[1:]
    return grad


def group_reward_from_positions(pos_i: np.ndarray, pos_other: np.ndarray) -> float:
    pos_i = np.asarray(pos_i, dtype=float)
    pos_other = np.asarray(pos_other, dtype=float)
    if pos_i.shape != pos_other.shape:
        raise ValueError("trajectories must have equal length")
    n = len(pos_i) - 1
    d = np.linalg.norm(pos_i[1:] - pos_other[1:], axis=1)
    n_m = int(np.argmin(d)) + 1  # earliest index on ties
    return (n - n_m + 1) * float(d[n_m - 1] ** 2)


def group_reward(traj_i: Trajectory, traj_other: Trajectory) -> float:
    """Temporal weight times squared closest inter-agent distance (steps 1..N)."""
    return group_reward_from_positions(traj_i.positions, traj_other.positions)


def group_reward_position_grad(pos_i: np.ndarray, pos_other: np.ndarray):
    """Gradients of R_G w.r.t. both agents' positions, holding n_m fixed."""
    pos_i = np.asarray(pos_i, dtype=float)
    pos_other = np.asarray(pos_other, dtype=float)
    n = len(pos_i) - 1
    delta = pos_i[1:] - pos_other[1:]
    d = np.linalg.norm(delta, axis=1)
    n_m = int(np.argmin(d)) + 1
    w = n - n_m + 1
    g_i = np.zeros_like(pos_i)
    g_o = np.zeros_like(pos_other)
    g_i[n_m] = 2.0 * w * delta[n_m - 1]
    g_o[n_m] = -2.0 * w * delta[n_m - 1]
    return g_i, g_o


def utility_from_positions(
    pos_i: np.ndarray,
    pos_other: np.ndarray,
    path_i: ReferencePath,
    ipv: Ipv,
    params: UtilityParams,
) -> float:
    ci, si = ipv.weights
    r_ind = individual_reward_from_positions(pos_i, path_i, params.alpha)
    r_grp = group_reward_from_positions(pos_i, pos_other)
    return ci * params.ind.z(r_ind) + si * params.grp.z(r_grp)


def utility(
    traj_i: Trajectory,
    traj_other: Trajectory,
    path_i: ReferencePath,
    ipv: Ipv,
    params: UtilityParams,
) -> float:
    """cos(theta) * Z(R_I) + sin(theta) * Z(R_G) with the frozen normalization."""
    return utility_from_positions(traj_i.positions, traj_other.positions, path_i, ipv, params)


def utility_position_grads(
    pos_i: np.ndarray,
    pos_other: np.ndarray,
    path_i: ReferencePath,
    ipv: Ipv,
    params: UtilityParams,
):
    """d U / d x (own positions) and d U / d x_other; both (N+1, 2)."""
    ci, si = ipv.weights
    g_ind = individual_reward_position_grad(pos_i, path_i, params.alpha)
    g_grp_i, g_grp_o = group_reward_position_grad(pos_i, pos_other)
    grad_i = (ci / params.ind.std) * g_ind + (si / params.grp.std) * g_grp_i
    grad_o = (si / params.grp.std) * g_grp_o
    return grad_i, grad_o


def calibrate_norm_stats(
    state_i: np.ndarray,
    path_i: ReferencePath,
    state_other: np.ndarray,
    path_other: ReferencePath,
    horizon: int,
    dt: float,
    wheelbase: float,
    limits: ControlLimits,
    alpha: float,
    rng: np.random.Generator,
    samples: int = 100,
):
    """Monte-Carlo z-score stats over each agent's own feasible rollouts.

    Per agent, the reward population samples the agent's controls uniformly
    within the limits while the counterpart follows its constant-motion
    prediction, so the normalization reflects the range the agent itself can
    influence; joint-random populations let the counterpart's randomness
    dominate the group-reward variance and flatten the social trade-off.
    Returns ((ind_i, grp_i), (ind_other, grp_other)); std values are floored.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")

    def _draw(n):
        return np.stack(
            [
                rng.uniform(-limits.accel, limits.accel, size=(n, horizon)),
                rng.uniform(-limits.steer, limits.steer, size=(n, horizon)),
            ],
            axis=-1,
        )

    u_i = _draw(samples)
    u_o = _draw(samples)
    pos_i = rollout_batch(state_i, u_i, dt, wheelbase)[:, :, 0:2]
    pos_o = rollout_batch(state_other, u_o, dt, wheelbase)[:, :, 0:2]
    cm_i = rollout_batch(state_i, np.zeros((1, horizon, 2)), dt, wheelbase)[0, :, 0:2]
    cm_o = rollout_batch(state_other, np.zeros((1, horizon, 2)), dt, wheelbase)[0, :, 0:2]

    def _ind_rewards(pos, path):
        flat = pos.reshape(-1, 2)
        _, s, dev, _, _ = project_many(path, flat)
        s = s.reshape(samples, horizon + 1)
        dev = dev.reshape(samples, horizon + 1)
        return (s[:, -1] - s[:, 0]) - alpha * dev[:, 1:].sum(axis=1)

    def _grp_rewards(pos_own, pos_counter):
        d = np.linalg.norm(pos_own[:, 1:, :] - pos_counter[None, 1:, :], axis=2)
        n_m = np.argmin(d, axis=1) + 1
        w = horizon - n_m + 1
        return w * d[np.arange(samples), n_m - 1] ** 2

    def _stats(r):
        return NormStats(float(np.mean(r)), float(max(np.std(r), STD_FLOOR)))

    r_ind_i = _ind_rewards(pos_i, path_i)
    r_ind_o = _ind_rewards(pos_o, path_other)
    grp_i = _stats(_grp_rewards(pos_i, cm_o))
    grp_o = _stats(_grp_rewards(pos_o, cm_i))
    return (_stats(r_ind_i), grp_i), (_stats(r_ind_o), grp_o)


def efficiency_reward_variant(traj: Trajectory, v_limit: float) -> float:
    """Mean relative speed shortfall penalty, an alternative travel-efficiency term."""
    if v_limit <= 0:
        raise ValueError("v_limit must be positive")
    v = traj.speeds
    return -float(np.mean(np.abs(v - v_limit) / v_limit))


def comfort_reward_variant(traj: Trajectory) -> float:
    """Negative mean absolute longitudinal jerk from second differences of speed."""
    if len(traj.states) < 3:
        raise ValueError("need at least 3 states for jerk")
    acc = np.diff(traj.speeds) / traj.step
    jerk = np.diff(acc) / traj.step
    return -float(np.mean(np.abs(jerk)))
