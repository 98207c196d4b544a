"""Surrogate safety and accuracy metrics for the left-turn interaction."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dynamics import Trajectory, wrap_angle
from .scenario import ReferencePath, conflict_point_with_arclens, project_many

VEHICLE_HALF_LENGTH = 2.25  # m, inflates the crossing point into a conflict area


@dataclass(frozen=True)
class ConflictGeometry:
    """Crossing point of the two paths plus each agent's arc distance to it."""

    point: np.ndarray
    dist_a: float
    dist_b: float

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))


def conflict_geometry(
    path_a: ReferencePath, path_b: ReferencePath, pos_a, pos_b
) -> ConflictGeometry | None:
    """Geometry snapshot for two agents at their current positions, or None if
    the paths ahead no longer cross."""
    hit = conflict_point_with_arclens(path_a, path_b)
    if hit is None:
        return None
    point, s_a, s_b = hit
    _, sa_pos, _, _, _ = project_many(path_a, np.reshape(pos_a, (1, 2)))
    _, sb_pos, _, _, _ = project_many(path_b, np.reshape(pos_b, (1, 2)))
    return ConflictGeometry(point, float(s_a - sa_pos[0]), float(s_b - sb_pos[0]))


class Apet(NamedTuple):
    value: float       # |TTCP_a - TTCP_b|, nonnegative
    lead: str          # 'a' or 'b', the agent reaching the conflict point first
    ttcp_a: float
    ttcp_b: float


def ttcp(distance: float, speed: float) -> float | None:
    """Time to conflict point under constant speed; None at standstill."""
    if speed <= 1e-9:
        return None
    return distance / speed


def apet(state_a, state_b, geometry: ConflictGeometry) -> Apet | None:
    """Anticipated post-encroachment time under constant speeds.

    Undefined (None) once either agent has crossed or when an upstream agent
    is at standstill. A value of zero flags a potential collision.
    """
    if geometry.dist_a < 0 or geometry.dist_b < 0:
        return None
    t_a = ttcp(geometry.dist_a, float(state_a[3]))
    t_b = ttcp(geometry.dist_b, float(state_b[3]))
    if t_a is None or t_b is None:
        return None
    lead = "a" if t_a <= t_b else "b"
    return Apet(abs(t_a - t_b), lead, t_a, t_b)


def _arc_positions(traj: Trajectory) -> np.ndarray:
    steps = np.linalg.norm(np.diff(traj.positions, axis=0), axis=1)
    return np.concatenate([[0.0], np.cumsum(steps)])


def _crossing_time(traj: Trajectory, s_target: float) -> float | None:
    """Linear-interpolated time at which the executed arc length reaches s_target."""
    s = _arc_positions(traj)
    t = traj.times
    if s_target <= s[0]:
        return float(t[0])
    hits = np.nonzero(s >= s_target)[0]
    if hits.size == 0:
        return None
    k = int(hits[0])
    ds = s[k] - s[k - 1]
    if ds <= 0:
        return float(t[k])
    frac = (s_target - s[k - 1]) / ds
    return float(t[k - 1] + frac * (t[k] - t[k - 1]))


def _conflict_arc(traj: Trajectory, point: np.ndarray) -> float:
    """Arc length along the executed polyline at the conflict point's projection."""
    pos = traj.positions
    seg_a = pos[:-1]
    seg_d = np.diff(pos, axis=0)
    len2 = np.maximum(np.einsum("ij,ij->i", seg_d, seg_d), 1e-18)
    tpar = np.clip(((point - seg_a) * seg_d).sum(axis=1) / len2, 0.0, 1.0)
    closest = seg_a + tpar[:, None] * seg_d
    dist2 = ((point - closest) ** 2).sum(axis=1)
    k = int(np.argmin(dist2))
    s = _arc_positions(traj)
    return float(s[k] + tpar[k] * math.sqrt(len2[k]))


def pet(
    traj_first: Trajectory,
    traj_second: Trajectory,
    geometry: ConflictGeometry,
    half_length: float = VEHICLE_HALF_LENGTH,
) -> float | None:
    """Post-encroachment time between the executed trajectories.

    The crossing point is inflated by the vehicle half length along each
    path: PET = (time the second agent reaches the area) - (time the first
    agent leaves it). None when either agent never gets there.
    """
    s_first = _conflict_arc(traj_first, geometry.point)
    s_second = _conflict_arc(traj_second, geometry.point)
    t_leave = _crossing_time(traj_first, s_first + half_length)
    t_reach = _crossing_time(traj_second, s_second - half_length)
    if t_leave is None or t_reach is None:
        return None
    return float(t_reach - t_leave)


def ade_fde(predicted: Trajectory, actual: Trajectory) -> tuple[float, float]:
    """Average and final displacement error over aligned horizons."""
    p = predicted.positions
    a = actual.positions
    if p.shape != a.shape:
        raise ValueError("trajectories must have equal length")
    err = np.linalg.norm(p - a, axis=1)
    return float(np.mean(err)), float(err[-1])


def detect_collision(traj_a: Trajectory, traj_b: Trajectory, epsilon_safe: float):
    """First time the center distance drops below epsilon_safe, or None.

    The crossing instant is linearly interpolated on the distance signal
    between steps.
    """
    pa, pb = traj_a.positions, traj_b.positions
    if pa.shape != pb.shape:
        raise ValueError("trajectories must share the time grid")
    d = np.linalg.norm(pa - pb, axis=1)
    t = traj_a.times
    below = np.nonzero(d < epsilon_safe)[0]
    if below.size == 0:
        return None
    k = int(below[0])
    if k == 0:
        return float(t[0])
    span = d[k - 1] - d[k]
    frac = 0.0 if span <= 0 else (d[k - 1] - epsilon_safe) / span
    return float(t[k - 1] + frac * (t[k] - t[k - 1]))


def _fractional_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def rank_sum_test(sample_a, sample_b) -> tuple[float, float]:
    """Mann-Whitney U (for sample_a) with tie-corrected normal approximation.

    Returns (U, two-sided p). Degenerate inputs where every value ties give
    p = 1.
    """
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    n1, n2 = len(a), len(b)
    if n1 < 3 or n2 < 3:
        raise ValueError("need at least 3 values per sample")
    combined = np.concatenate([a, b])
    ranks = _fractional_ranks(combined)
    r1 = float(np.sum(ranks[:n1]))
    u = r1 - n1 * (n1 + 1) / 2.0
    n = n1 + n2
    _, counts = np.unique(combined, return_counts=True)
    tie_term = float(np.sum(counts**3 - counts))
    correction = 1.0 - tie_term / (n**3 - n)
    if correction <= 0.0:
        return u, 1.0
    sd = math.sqrt(correction * n1 * n2 * (n + 1) / 12.0)
    z = (u - n1 * n2 / 2.0) / sd
    p = 2.0 * 0.5 * math.erfc(abs(z) / math.sqrt(2.0))
    return u, float(min(1.0, p))


def trajectory_stats(traj: Trajectory) -> tuple[float, float | None]:
    """(mean speed, mean absolute curvature); curvature None for stationary tracks."""
    mean_speed = float(np.mean(traj.speeds))
    if len(traj.states) < 3:
        raise ValueError("need at least 3 states for curvature")
    dpsi = wrap_angle(np.diff(traj.headings))
    ds = np.linalg.norm(np.diff(traj.positions, axis=0), axis=1)
    ok = ds > 1e-6
    if not np.any(ok):
        return mean_speed, None
    kappa = np.abs(dpsi[ok]) / ds[ok]
    return mean_speed, float(np.mean(kappa))
