"""Unprotected left-turn scene: layout, dynamic reference paths, lane constraint."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._kernels import first_intersection, project_points

DEFAULT_LANE_WIDTH = 3.5   # m
DEFAULT_VEHICLE_WIDTH = 1.8  # m
SAMPLE_STEP = 0.1          # m, polyline resolution
PATH_EXTENSION = 40.0      # m appended past the exit along the exit direction


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    heading: float

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])

    @property
    def direction(self) -> np.ndarray:
        return np.array([np.cos(self.heading), np.sin(self.heading)])


@dataclass(frozen=True)
class ReferencePath:
    """Polyline with cumulative arc length, plus the analytic endpoint tangents."""

    points: np.ndarray         # (M, 2)
    generation_pose: Pose
    start_tangent: np.ndarray  # unit (2,)
    end_tangent: np.ndarray    # unit (2,)
    exit_s: float              # arc length at the exit point (path extends beyond)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise ValueError("polyline needs at least two planar points")
        object.__setattr__(self, "points", pts)

    @cached_property
    def arclen(self) -> np.ndarray:
        seg = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        return np.concatenate([[0.0], np.cumsum(seg)])

    @cached_property
    def _segments(self):
        a = self.points[:-1]
        d = np.diff(self.points, axis=0)
        len2 = np.einsum("ij,ij->i", d, d)
        return a, d, np.maximum(len2, 1e-18)

    @property
    def length(self) -> float:
        return float(self.arclen[-1])

    def point_at(self, s: float) -> np.ndarray:
        """Point at arc length s (clamped to the polyline range)."""
        s = float(np.clip(s, 0.0, self.length))
        i = int(np.searchsorted(self.arclen, s, side="right") - 1)
        i = min(i, len(self.points) - 2)
        ds = self.arclen[i + 1] - self.arclen[i]
        t = 0.0 if ds <= 0 else (s - self.arclen[i]) / ds
        return self.points[i] + t * (self.points[i + 1] - self.points[i])


@dataclass(frozen=True)
class Projection:
    closest_point: np.ndarray
    longitudinal: float
    deviation: float
    tangent: np.ndarray   # unit tangent of the matched segment
    normal_dir: np.ndarray  # unit vector from closest point toward the query (0 if on path)


def project_many(path: ReferencePath, pts) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Project points onto the polyline.

    Returns (closest (P,2), longitudinal (P,), deviation (P,), tangent (P,2),
    normal_dir (P,2)).
    """
    pts = np.ascontiguousarray(np.atleast_2d(np.asarray(pts, dtype=float)))
    a, d, len2 = path._segments
    return project_points(pts, a, d, len2, path.arclen)


def project(path: ReferencePath, p) -> Projection:
    """Closest on-path point, its arc length, and the deviation of p."""
    best, s, dev, tan, nrm = project_many(path, np.asarray(p, dtype=float).reshape(1, 2))
    return Projection(best[0], float(s[0]), float(dev[0]), tan[0], nrm[0])


def lane_constraint(path: ReferencePath, p, lane_width: float, vehicle_width: float) -> float:
    """g = deviation^2 - ((w_lane - w_veh)/2)^2; g <= 0 iff the vehicle stays in lane."""
    dev = project(path, p).deviation
    half = 0.5 * (lane_width - vehicle_width)
    return dev * dev - half * half


def _hermite(p0, m0, p1, m1, t):
    t = np.asarray(t, dtype=float)[:, None]
    h00 = 2 * t**3 - 3 * t**2 + 1
    h10 = t**3 - 2 * t**2 + t
    h01 = -2 * t**3 + 3 * t**2
    h11 = t**3 - t**2
    return h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1


def build_reference_path(
    pose: Pose,
    exit_pose: Pose,
    sample_step: float = SAMPLE_STEP,
    extension: float = PATH_EXTENSION,
) -> ReferencePath:
    """Cubic Hermite spline from the agent to the intersection exit.

    Start tangent follows the agent's velocity direction (heading when
    stopped); end tangent follows the exit lane center line. Tangent
    magnitudes equal the chord length. The polyline continues past the exit
    along the exit direction so projections stay well defined after crossing.
    Degenerate geometry (agent at or beyond the exit) falls back to a single
    ray along the exit direction.
    """
    p0 = pose.position
    d0 = pose.direction
    p1 = exit_pose.position
    d1 = exit_pose.direction
    chord = float(np.linalg.norm(p1 - p0))
    if chord < 1e-9 or np.dot(p1 - p0, d1) <= 0.0:
        n = max(2, int(np.ceil(extension / sample_step)) + 1)
        s = np.linspace(0.0, extension, n)
        pts = p0[None, :] + s[:, None] * d1[None, :]
        return ReferencePath(pts, pose, d1.copy(), d1.copy(), exit_s=0.0)

    m0 = chord * d0
    m1 = chord * d1
    # dense parameter sampling, then uniform arc-length resampling
    dense = _hermite(p0, m0, p1, m1, np.linspace(0.0, 1.0, max(80, int(chord * 30))))
    seglen = np.linalg.norm(np.diff(dense, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seglen)])
    total = cum[-1]
    n = max(2, int(np.ceil(total / sample_step)) + 1)
    s_grid = np.linspace(0.0, total, n)
    pts = np.column_stack(
        [np.interp(s_grid, cum, dense[:, 0]), np.interp(s_grid, cum, dense[:, 1])]
    )
    pts[0] = p0
    pts[-1] = p1
    exit_s = total
    if extension > 0:
        n_ext = max(1, int(np.ceil(extension / sample_step)))
        s_ext = np.linspace(sample_step, extension, n_ext)
        pts = np.vstack([pts, p1[None, :] + s_ext[:, None] * d1[None, :]])
    return ReferencePath(pts, pose, d0.copy(), d1.copy(), exit_s=float(exit_s))


def _segment_intersections(a_pts: np.ndarray, b_pts: np.ndarray):
    """All proper intersections between two polylines.

    Returns (points (H, 2), s_a (H,), s_b (H,)) sorted by arc order along a.
    Near-parallel segment pairs are skipped.
    """
    pa = a_pts[:-1]
    ra = np.diff(a_pts, axis=0)
    pb = b_pts[:-1]
    rb = np.diff(b_pts, axis=0)
    cum_a = np.concatenate([[0.0], np.cumsum(np.linalg.norm(ra, axis=1))])
    cum_b = np.concatenate([[0.0], np.cumsum(np.linalg.norm(rb, axis=1))])

    cross = ra[:, None, 0] * rb[None, :, 1] - ra[:, None, 1] * rb[None, :, 0]
    qp = pb[None, :, :] - pa[:, None, :]
    qp_x_rb = qp[:, :, 0] * rb[None, :, 1] - qp[:, :, 1] * rb[None, :, 0]
    qp_x_ra = qp[:, :, 0] * ra[:, None, 1] - qp[:, :, 1] * ra[:, None, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = qp_x_rb / cross
        u = qp_x_ra / cross
    ok = (np.abs(cross) > 1e-14) & (t >= 0.0) & (t <= 1.0) & (u >= 0.0) & (u <= 1.0)
    ia, ib = np.nonzero(ok)
    if ia.size == 0:
        return np.empty((0, 2)), np.empty(0), np.empty(0)
    ts = t[ia, ib]
    us = u[ia, ib]
    pts = pa[ia] + ts[:, None] * ra[ia]
    s_a = cum_a[ia] + ts * np.linalg.norm(ra[ia], axis=1)
    s_b = cum_b[ib] + us * np.linalg.norm(rb[ib], axis=1)
    order = np.argsort(s_a, kind="stable")
    pts, s_a, s_b = pts[order], s_a[order], s_b[order]
    # collapse duplicates from shared polyline vertices
    keep = np.ones(len(s_a), dtype=bool)
    for i in range(1, len(s_a)):
        if keep[i] and np.any(
            (np.abs(s_a[:i][keep[:i]] - s_a[i]) < 1e-6)
        ):
            keep[i] = False
    return pts[keep], s_a[keep], s_b[keep]


def conflict_point(path_a: ReferencePath, path_b: ReferencePath):
    """First intersection of the two polylines in path_a's arc order, or None."""
    found, x, y, _, _ = first_intersection(path_a.points, path_b.points)
    return np.array([x, y]) if found else None


def conflict_point_with_arclens(path_a: ReferencePath, path_b: ReferencePath):
    """(point, s_a, s_b) of the first crossing in path_a's order, or None."""
    found, x, y, s_a, s_b = first_intersection(path_a.points, path_b.points)
    if not found:
        return None
    return np.array([x, y]), float(s_a), float(s_b)


@dataclass(frozen=True)
class IntersectionLayout:
    """Unprotected left-turn scene geometry.

    The left-turn (LT) agent enters northbound and exits westbound; the
    straight-through (ST) agent enters southbound and keeps its lane. Nominal
    center lines built from the entry poses must cross exactly once.
    """

    lane_width: float = DEFAULT_LANE_WIDTH
    vehicle_width: float = DEFAULT_VEHICLE_WIDTH
    lt_entry: Pose = field(default=None)  # type: ignore[assignment]
    lt_exit: Pose = field(default=None)   # type: ignore[assignment]
    st_entry: Pose = field(default=None)  # type: ignore[assignment]
    st_exit: Pose = field(default=None)   # type: ignore[assignment]
    conflict_region_center: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not (self.lane_width > self.vehicle_width > 0):
            raise ValueError("need lane_width > vehicle_width > 0")
        half = 0.5 * self.lane_width
        if self.lt_entry is None:
            object.__setattr__(self, "lt_entry", Pose(half, -8.0, np.pi / 2))
        if self.lt_exit is None:
            object.__setattr__(self, "lt_exit", Pose(-8.0, half, np.pi))
        if self.st_entry is None:
            object.__setattr__(self, "st_entry", Pose(-half, 12.0, -np.pi / 2))
        if self.st_exit is None:
            object.__setattr__(self, "st_exit", Pose(-half, -20.0, -np.pi / 2))
        cp = conflict_point(self.nominal_lt_path(), self.nominal_st_path())
        if cp is None:
            raise ValueError("nominal center lines do not intersect")
        pts, _, _ = _segment_intersections(
            self.nominal_lt_path().points, self.nominal_st_path().points
        )
        if len(pts) != 1:
            raise ValueError(f"nominal center lines cross {len(pts)} times, expected 1")
        if self.conflict_region_center is None:
            object.__setattr__(self, "conflict_region_center", cp)
        else:
            object.__setattr__(
                self, "conflict_region_center", np.asarray(self.conflict_region_center, dtype=float)
            )

    @property
    def lane_margin(self) -> float:
        """Allowed center-line deviation (w_lane - w_veh)/2."""
        return 0.5 * (self.lane_width - self.vehicle_width)

    def nominal_lt_path(self) -> ReferencePath:
        return build_reference_path(self.lt_entry, self.lt_exit)

    def nominal_st_path(self) -> ReferencePath:
        return build_reference_path(self.st_entry, self.st_exit)

    def exit_pose(self, role: str) -> Pose:
        if role == "lt":
            return self.lt_exit
        if role == "st":
            return self.st_exit
        raise ValueError(f"unknown role {role!r}")


def default_layout() -> IntersectionLayout:
    return IntersectionLayout()
