"""Per-step decision makers: the interaction-aware planner with the rule-based
IPV-expressing strategy, the optimal-control baselines, and the plain IBR baseline."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import Control, constant_motion_prediction, AgentState
from .estimation import IpvEstimate
from .game import (
    DEFAULT_SOLVER,
    GameSolution,
    GameSpec,
    SolverOptions,
    iterate_best_response,
    maximize_utility,
    solve_kkt,
)

VGIM_DYNAMIC = "vgim-dynamic"
VGIM_FIXED = "vgim-fixed"
IBR = "ibr"
OPT_SAFE = "opt-safe"
OPT_COOP = "opt-coop"
OPT_DYNA = "opt-dyna"

PLANNER_KINDS = (VGIM_DYNAMIC, VGIM_FIXED, IBR, OPT_SAFE, OPT_COOP, OPT_DYNA)
ESTIMATE_CONSUMERS = (VGIM_DYNAMIC, VGIM_FIXED, OPT_COOP, OPT_DYNA)

COMFORT_BRAKE = -2.0  # m/s^2, fallback when the game solve does not converge


@dataclass(frozen=True)
class PlannerConfig:
    kind: str
    fixed_theta: float = 0.0
    epsilon_safe: float = 2.0          # m, minimal safe center distance
    apet_threshold: float = 3.0        # s, temporal-advantage trigger
    theta_competitive: float = -np.pi / 8
    theta_cooperative: float = np.pi / 4
    coop_trigger: float = np.pi / 8    # counterpart-cooperativeness trigger

    def __post_init__(self):
        if self.kind not in PLANNER_KINDS:
            raise ValueError(f"unknown planner kind {self.kind!r}")
        if not self.epsilon_safe > 0:
            raise ValueError("epsilon_safe must be positive")
        for th in (self.fixed_theta, self.theta_competitive, self.theta_cooperative):
            if not -np.pi / 2 <= th <= np.pi / 2:
                raise ValueError("theta constants must lie in [-pi/2, pi/2]")

    @property
    def consumes_estimate(self) -> bool:
        return self.kind in ESTIMATE_CONSUMERS


@dataclass
class PlanContext:
    """Everything one planning step may consume, assembled by the harness."""

    spec: GameSpec                     # ego = planning agent; other = interaction partner
    estimate: IpvEstimate | None = None
    apet: float | None = None          # nonnegative magnitude; None when undefined
    ego_leads: bool | None = None
    warm_start: np.ndarray | None = None
    options: SolverOptions = field(default_factory=lambda: DEFAULT_SOLVER)


@dataclass
class PlanResult:
    control: Control
    theta_used: float | None
    fallback: bool
    solution: GameSolution | None = None
    diagnostics: dict = field(default_factory=dict)


def rule_based_ipv(
    cfg: PlannerConfig,
    theta_hat_other: float | None,
    apet: float | None,
    ego_leads: bool | None,
) -> float:
    """Competitive when the counterpart reads cooperative or the ego clearly
    leads the conflict point; cooperative otherwise."""
    if theta_hat_other is None:
        theta_hat_other = 0.0
    if theta_hat_other > cfg.coop_trigger:
        return cfg.theta_competitive
    if (
        apet is not None
        and apet > cfg.apet_threshold
        and bool(ego_leads)
    ):
        return cfg.theta_competitive
    return cfg.theta_cooperative


def _first_control(traj) -> Control:
    return Control(float(traj.controls[0, 0]), float(traj.controls[0, 1]))


def _brake_control(accel: float) -> Control:
    return Control(accel, 0.0)


def plan_vgim(ctx: PlanContext, cfg: PlannerConfig) -> PlanResult:
    """Receding-horizon game solve with IPV set by rule or held fixed."""
    theta_hat = ctx.estimate.theta_hat if ctx.estimate is not None else 0.0
    if cfg.kind == VGIM_DYNAMIC:
        theta_i = rule_based_ipv(cfg, theta_hat, ctx.apet, ctx.ego_leads)
    else:
        theta_i = cfg.fixed_theta
    theta_hat = float(np.clip(theta_hat, -np.pi / 2, np.pi / 2))
    spec = replace(
        ctx.spec,
        ego=replace(ctx.spec.ego, theta=theta_i),
        other=replace(ctx.spec.other, theta=theta_hat),
    )
    sol = solve_kkt(spec, warm_start=ctx.warm_start, options=ctx.options)
    diag = {
        "stationarity": sol.stationarity_norm,
        "complementarity": sol.complementarity_norm,
        "theta_hat_other": theta_hat,
    }
    if not sol.converged:
        return PlanResult(_brake_control(COMFORT_BRAKE), theta_i, True, sol, diag)
    return PlanResult(_first_control(sol.ego), theta_i, False, sol, diag)


def plan_opt(ctx: PlanContext, cfg: PlannerConfig, variant: str | None = None) -> PlanResult:
    """Optimal-control baselines: predict the counterpart, then plan around it.

    The counterpart is predicted by maximizing its utility (individual reward
    for the safe variant; the estimated-IPV utility otherwise) against a
    constant-motion ego; the ego then maximizes its variant utility subject to
    a hard separation from that prediction.
    """
    kind = variant or {OPT_SAFE: "safe", OPT_COOP: "coop", OPT_DYNA: "dyna"}[cfg.kind]
    if kind not in ("safe", "coop", "dyna"):
        raise ValueError(f"unknown opt variant {kind!r}")
    spec = ctx.spec
    theta_hat = ctx.estimate.theta_hat if ctx.estimate is not None else 0.0
    theta_hat = float(np.clip(theta_hat, -np.pi / 2, np.pi / 2))

    ego_cm = constant_motion_prediction(
        AgentState.from_array(spec.ego.state), spec.horizon, spec.dt, spec.wheelbase
    )
    if kind == "safe":
        w_other = (1.0, 0.0)
    else:
        w_other = (float(np.cos(theta_hat)), float(np.sin(theta_hat)))
    pred = maximize_utility(
        spec, "other", ego_cm.positions, weights=w_other, options=ctx.options
    )

    theta_used: float | None = None
    if kind == "safe":
        w_ego = (1.0, 0.0)
    elif kind == "coop":
        w_ego = (1.0, 1.0)
    else:
        theta_used = rule_based_ipv(cfg, theta_hat, ctx.apet, ctx.ego_leads)
        w_ego = (float(np.cos(theta_used)), float(np.sin(theta_used)))
    ego = maximize_utility(
        spec,
        "ego",
        pred.trajectory.positions,
        weights=w_ego,
        warm_start=ctx.warm_start,
        min_separation=cfg.epsilon_safe,
        options=ctx.options,
    )
    diag = {"theta_hat_other": theta_hat, "predicted_other": pred.trajectory}
    if not ego.converged:
        # no plan clears the predicted counterpart: maximal braking
        return PlanResult(
            _brake_control(-spec.limits.accel), theta_used, True, None, diag
        )
    return PlanResult(_first_control(ego.trajectory), theta_used, False, None, diag)


def plan_ibr(ctx: PlanContext, cfg: PlannerConfig) -> PlanResult:
    """Nash-seeking iterative best response on individual rewards only."""
    spec = replace(
        ctx.spec,
        ego=replace(ctx.spec.ego, theta=0.0),
        other=replace(ctx.spec.other, theta=0.0),
        min_separation=cfg.epsilon_safe,
    )
    sol = iterate_best_response(spec, options=ctx.options)
    return PlanResult(
        _first_control(sol.ego),
        0.0,
        not sol.converged,
        sol,
        {"rounds": sol.iterations},
    )


def plan(ctx: PlanContext, cfg: PlannerConfig) -> PlanResult:
    """Dispatch on the configured planner kind."""
    if cfg.kind in (VGIM_DYNAMIC, VGIM_FIXED):
        return plan_vgim(ctx, cfg)
    if cfg.kind in (OPT_SAFE, OPT_COOP, OPT_DYNA):
        return plan_opt(ctx, cfg)
    if cfg.kind == IBR:
        return plan_ibr(ctx, cfg)
    raise ValueError(f"unknown planner kind {cfg.kind!r}")
