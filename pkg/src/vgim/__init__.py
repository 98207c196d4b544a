"""Game-theoretic two-agent driving interaction simulator with IPV estimation."""

from .dynamics import AgentState, Control, ControlLimits, Trajectory
from .rewards import Ipv, NormStats, UtilityParams
from .scenario import IntersectionLayout, Pose, ReferencePath, default_layout

__all__ = [
    "AgentState",
    "Control",
    "ControlLimits",
    "Trajectory",
    "Ipv",
    "NormStats",
    "UtilityParams",
    "IntersectionLayout",
    "Pose",
    "ReferencePath",
    "default_layout",
]

__version__ = "0.1.0"
