"""Virtual-game IPV estimation from observed trajectories.

Per frame, the observer solves virtual games for a grid of counterpart IPV
hypotheses, scores each hypothesis track against the subsequently observed
positions with an isotropic Gaussian likelihood, and assembles a weighted
estimate with its spread. Estimates are meaningful only while the interaction
is live; after either vehicle crosses the conflict point the estimate decays
geometrically toward zero.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import Trajectory
from .game import FAST_SOLVER, GameSpec, SolverOptions, solve_kkt

HALF_PI = np.pi / 2
UNINFORMED_SIGMA = float(np.pi / np.sqrt(12.0))  # std of U(-pi/2, pi/2)
LOG_UNDERFLOW = -700.0


@dataclass
class HypothesisSet:
    """Counterpart behavior hypotheses: IPV grid, simulated tracks, weights."""

    thetas: np.ndarray            # (K,)
    trajectories: list[Trajectory]
    weights: np.ndarray           # (K,), nonnegative, sums to 1
    failed: np.ndarray            # (K,) bool, solver fell back to best iterate

    def __post_init__(self):
        if len(self.thetas) < 2:
            raise ValueError("need at least 2 hypotheses")


@dataclass(frozen=True)
class IpvEstimate:
    theta_hat: float
    sigma: float
    active: bool
    frame_time: float
    low_confidence: bool = False


def quantile_thetas(k: int) -> np.ndarray:
    """Deterministic interior quantiles of the open IPV interval."""
    if k < 2:
        raise ValueError("need at least 2 hypotheses")
    return -HALF_PI + np.pi * np.arange(1, k + 1) / (k + 1)


def generate_hypotheses(
    spec: GameSpec,
    k: int = 11,
    sampling: str = "quantile",
    rng: np.random.Generator | None = None,
    options: SolverOptions = FAST_SOLVER,
    warm_cache: dict | None = None,
) -> HypothesisSet:
    """Solve one virtual game per sampled counterpart IPV.

    The spec's ego side is the observing agent (with its current belief);
    its counterpart theta is replaced by each hypothesis value in turn and the
    counterpart's predicted trajectory is stored. Equal theta values share one
    solve. Failed solves keep the best iterate, flagged. An optional warm
    cache (hypothesis theta -> solver vector) is consulted and refreshed, so a
    per-frame caller pays for full solves only on the first frame.
    """
    if sampling == "quantile":
        thetas = quantile_thetas(k)
    elif sampling == "uniform":
        if rng is None:
            raise ValueError("uniform sampling needs an rng")
        thetas = np.sort(rng.uniform(-HALF_PI, HALF_PI, size=k))
    else:
        raise ValueError(f"unknown sampling mode {sampling!r}")

    trajectories: list[Trajectory] = []
    failed = np.zeros(k, dtype=bool)
    solved: dict[float, tuple[Trajectory, bool]] = {}
    warm_chain = None
    for i, theta in enumerate(thetas):
        key = float(theta)
        if key in solved:
            traj, bad = solved[key]
        else:
            hyp_spec = replace(spec, other=replace(spec.other, theta=key))
            warm = None
            if warm_cache is not None:
                warm = warm_cache.get(key)
            if warm is None:
                warm = warm_chain
            sol = solve_kkt(hyp_spec, warm_start=warm, options=options)
            z_sol = np.concatenate(
                [sol.ego.controls.ravel(), sol.other.controls.ravel(), sol.multipliers]
            )
            warm_chain = z_sol
            if warm_cache is not None:
                warm_cache[key] = z_sol
            traj, bad = sol.other, not sol.converged
            solved[key] = (traj, bad)
        trajectories.append(traj)
        failed[i] = bad
    weights = np.full(k, 1.0 / k)
    return HypothesisSet(thetas=thetas, trajectories=trajectories, weights=weights, failed=failed)


def log_likelihood(hyp_traj: Trajectory, observed_positions: np.ndarray, sigma_obs: float) -> float:
    """Log product of isotropic Gaussian densities over the observation window.

    observed_positions holds the W positions observed after the hypothesis was
    generated; they are compared with the track's steps 1..W.
    """
    obs = np.atleast_2d(np.asarray(observed_positions, dtype=float))
    if obs.size == 0:
        raise ValueError("empty observation window")
    w = len(obs)
    pred = hyp_traj.positions[1 : w + 1]
    if len(pred) < w:
        raise ValueError("hypothesis track shorter than the observation window")
    sq = float(np.sum((obs - pred) ** 2))
    var = sigma_obs**2
    return -sq / (2.0 * var) - w * np.log(2.0 * np.pi * var)


def likelihood(hyp_traj: Trajectory, observed_positions: np.ndarray, sigma_obs: float) -> float:
    """Gaussian track similarity (may underflow for distant tracks; see estimate)."""
    return float(np.exp(log_likelihood(hyp_traj, observed_positions, sigma_obs)))


def estimate(
    hyps: HypothesisSet,
    observed_positions: np.ndarray,
    sigma_obs: float,
    frame_time: float = 0.0,
    active: bool = True,
) -> IpvEstimate:
    """Weighted-sum IPV estimate with the paper's square-root spread.

    Weights are computed in the log domain and exponentiated after shifting by
    the maximum; if every hypothesis underflows outright the weights fall back
    to uniform and the estimate is flagged low-confidence.
    """
    logs = np.array(
        [log_likelihood(t, observed_positions, sigma_obs) for t in hyps.trajectories]
    )
    m = float(np.max(logs))
    if not np.isfinite(m) or m < LOG_UNDERFLOW:
        weights = np.full(len(hyps.thetas), 1.0 / len(hyps.thetas))
        theta_hat = float(np.sum(weights * hyps.thetas))
        sigma = 0.5 * float(np.max(hyps.thetas) - np.min(hyps.thetas))
        hyps.weights = weights
        return IpvEstimate(theta_hat, sigma, active, frame_time, low_confidence=True)
    w = np.exp(logs - m)
    w = w / np.sum(w)
    hyps.weights = w
    theta_hat = float(np.sum(w * hyps.thetas))
    sigma = float(np.sqrt(np.sum(w * (hyps.thetas - theta_hat) ** 2)))
    return IpvEstimate(theta_hat, sigma, active, frame_time)


def interaction_lifecycle(
    estimates: list[IpvEstimate], crossed_flags: list[bool], decay: float = 0.8
) -> list[IpvEstimate]:
    """Pass estimates through while the interaction is live; decay afterwards."""
    out: list[IpvEstimate] = []
    theta = 0.0
    finished = False
    for est, crossed in zip(estimates, crossed_flags):
        finished = finished or crossed
        if finished:
            theta *= decay
            out.append(
                IpvEstimate(theta, est.sigma, False, est.frame_time, est.low_confidence)
            )
        else:
            theta = est.theta_hat
            out.append(est)
    return out


class IpvTracker:
    """Per-frame IPV estimation of one observed agent.

    Hypothesis sets are generated from the live scene each frame and scored
    ``window`` frames later against the positions observed in between, so the
    estimator stays third-party computable (observed trajectories only).
    """

    def __init__(
        self,
        k: int = 11,
        window: int = 3,
        sigma_obs: float = 0.5,
        decay: float = 0.8,
        smoothing: float | None = None,
        solver: SolverOptions = FAST_SOLVER,
    ):
        if window < 1:
            raise ValueError("window must be >= 1")
        self.k = k
        self.window = window
        self.sigma_obs = sigma_obs
        self.decay = decay
        self.smoothing = smoothing
        self.solver = solver
        self.history: list[IpvEstimate] = []
        self._pending: deque[tuple[int, HypothesisSet]] = deque()
        self._observed: list[np.ndarray] = []
        self._warm_cache: dict = {}
        self._frame = 0
        self._theta = 0.0
        self._finished = False

    @property
    def theta_hat(self) -> float:
        return self._theta

    def update(
        self, spec: GameSpec | None, observed_position, crossed: bool, frame_time: float
    ) -> IpvEstimate:
        """Advance one frame.

        spec carries the observer's current view (ego side = observer); it may
        be None once the interaction has finished. observed_position is the
        target's position at this frame.
        """
        self._observed.append(np.asarray(observed_position, dtype=float))
        raw: IpvEstimate | None = None
        if not self._finished and not crossed:
            while self._pending and self._frame - self._pending[0][0] > self.window:
                self._pending.popleft()
            if self._pending and self._frame - self._pending[0][0] == self.window:
                gen_frame, hyps = self._pending.popleft()
                obs = np.array(self._observed[gen_frame + 1 : gen_frame + 1 + self.window])
                raw = estimate(hyps, obs, self.sigma_obs, frame_time=frame_time)
            if spec is not None:
                self._pending.append(
                    (
                        self._frame,
                        generate_hypotheses(
                            spec, self.k, options=self.solver, warm_cache=self._warm_cache
                        ),
                    )
                )

        if self._finished or crossed:
            self._finished = True
            self._theta *= self.decay
            est = IpvEstimate(self._theta, 0.0, False, frame_time)
        elif raw is None:
            est = IpvEstimate(0.0, UNINFORMED_SIGMA, True, frame_time, low_confidence=True)
            self._theta = 0.0
        else:
            theta = raw.theta_hat
            if self.smoothing is not None and self.history:
                theta = self.smoothing * self._theta + (1.0 - self.smoothing) * theta
            self._theta = theta
            est = IpvEstimate(theta, raw.sigma, True, frame_time, raw.low_confidence)
        self.history.append(est)
        self._frame += 1
        return est
