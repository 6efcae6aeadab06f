"""Event-triggered average consensus for single-integrator agents."""

from .graph import build_graph, fiedler_value, laplacian, spectral_norm
from .simulator import SimConfig, SimResult, run
from .triggering import ALL_LAWS, LawKind, TriggerParams

__all__ = [
    "ALL_LAWS",
    "LawKind",
    "SimConfig",
    "SimResult",
    "TriggerParams",
    "build_graph",
    "fiedler_value",
    "laplacian",
    "run",
    "spectral_norm",
]
