"""Single-integrator agents under event-triggered control.

Each agent holds its true state ``x_i`` and a broadcast copy ``x_hat_i`` that
is refreshed only when the agent triggers. Controls use broadcast values, so
they are piecewise constant. A new broadcast takes effect at the trigger
instant itself (left-closed convention).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class AgentState:
    x: float
    x_hat: float
    last_trigger_time: float = 0.0
    internal: float = 0.0

    @property
    def e(self) -> float:
        return self.x_hat - self.x


def control_input(i: int, lap, x_hat) -> float:
    """u_i = -sum_j L_ij x_hat_j."""
    return -float(np.dot(lap[i], x_hat))


def control_inputs(lap, x_hat) -> np.ndarray:
    return -(np.asarray(lap) @ np.asarray(x_hat, dtype=float))


def local_disagreement_q(i: int, lap, x) -> float:
    """q_i = -1/2 sum_j L_ij (x_j - x_i)^2, computed from true states."""
    x = np.asarray(x, dtype=float)
    d = x - x[i]
    return float(-0.5 * np.dot(lap[i], d * d))


def local_disagreement_qhat(i: int, lap, x_hat) -> float:
    """Same functional as :func:`local_disagreement_q`, evaluated on broadcast values."""
    return local_disagreement_q(i, lap, x_hat)


def local_disagreements(lap, x) -> np.ndarray:
    """Vector of q_i for every agent."""
    x = np.asarray(x, dtype=float)
    d = x[None, :] - x[:, None]
    return -0.5 * np.sum(np.asarray(lap) * d * d, axis=1)


def sum_q_equals_quadratic(lap, x, rtol: float = 1e-9) -> bool:
    """Check sum_i q_i(x) == x^T L x, relative to max(1, x^T L x)."""
    x = np.asarray(x, dtype=float)
    quad = float(x @ np.asarray(lap) @ x)
    total = float(np.sum(local_disagreements(lap, x)))
    return abs(total - quad) <= rtol * max(1.0, abs(quad))
