"""The four distributed triggering laws.

Static laws fire when the squared measurement error exceeds a fraction of the
local disagreement. Dynamic laws compare the same gap, scaled by ``theta``,
against a per-agent internal variable that obeys its own ODE. Continuous laws
use ``q_i`` from live neighbour states; broadcast laws use ``q_hat_i`` from the
neighbours' last broadcasts.

All checks return True when the agent must trigger; the boundary (equality)
does not fire.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields

import numpy as np

from .errors import (
    NonpositiveBeta,
    NonpositiveInternal,
    NonpositiveInternal0,
    ParamError,
    SigmaOutOfRange,
    ThetaTooSmall,
    XiOutOfRange,
)


class LawKind(enum.Enum):
    STATIC_CONTINUOUS = "static-continuous"
    DYNAMIC_CONTINUOUS = "dynamic-continuous"
    STATIC_BROADCAST = "static-broadcast"
    DYNAMIC_BROADCAST = "dynamic-broadcast"

    @property
    def is_dynamic(self) -> bool:
        return self in (LawKind.DYNAMIC_CONTINUOUS, LawKind.DYNAMIC_BROADCAST)

    @property
    def uses_broadcast(self) -> bool:
        """True if the law reads q_hat (broadcast values) instead of q."""
        return self in (LawKind.STATIC_BROADCAST, LawKind.DYNAMIC_BROADCAST)

    @property
    def internal_name(self) -> str:
        return "chi" if self.uses_broadcast else "eta"

    @classmethod
    def parse(cls, name: str) -> "LawKind":
        key = name.strip().lower().replace("_", "-")
        for kind in cls:
            if kind.value == key:
                return kind
        raise ValueError(f"unknown law {name!r}; expected one of {[k.value for k in cls]}")


# Canonical ordering used by comparisons and reports.
ALL_LAWS = (
    LawKind.STATIC_CONTINUOUS,
    LawKind.DYNAMIC_CONTINUOUS,
    LawKind.STATIC_BROADCAST,
    LawKind.DYNAMIC_BROADCAST,
)


@dataclass(frozen=True)
class TriggerParams:
    """Per-agent law parameters, stored as tuples of floats.

    ``internal0`` is the initial value of eta_i (continuous) or chi_i
    (broadcast). Static laws only read ``sigma``.
    """

    sigma: tuple[float, ...]
    beta: tuple[float, ...]
    xi: tuple[float, ...]
    theta: tuple[float, ...]
    internal0: tuple[float, ...]

    def __post_init__(self):
        lengths = set()
        for f in fields(self):
            value = tuple(float(v) for v in getattr(self, f.name))
            object.__setattr__(self, f.name, value)
            lengths.add(len(value))
        if len(lengths) != 1:
            raise ParamError(f"per-agent parameter vectors differ in length: {sorted(lengths)}")

    @classmethod
    def uniform(cls, n: int, sigma=0.5, beta=1.0, xi=1.0, theta=1.0, internal0=10.0) -> "TriggerParams":
        return cls(*((float(v),) * n for v in (sigma, beta, xi, theta, internal0)))

    @property
    def n(self) -> int:
        return len(self.sigma)

    def arrays(self) -> dict[str, np.ndarray]:
        return {f.name: np.array(getattr(self, f.name)) for f in fields(self)}


def validate_params(p: TriggerParams, kind: LawKind) -> TriggerParams:
    for i in range(p.n):
        sigma = p.sigma[i]
        if kind.is_dynamic:
            if not 0.0 <= sigma < 1.0:
                raise SigmaOutOfRange(f"agent {i + 1}: sigma={sigma!r} not in [0, 1)", i)
        elif not 0.0 < sigma < 1.0:
            raise SigmaOutOfRange(f"agent {i + 1}: sigma={sigma!r} not in (0, 1)", i)
        if not kind.is_dynamic:
            continue
        beta, xi, theta, internal0 = p.beta[i], p.xi[i], p.theta[i], p.internal0[i]
        if not beta > 0:
            raise NonpositiveBeta(f"agent {i + 1}: beta={beta!r} must be positive", i)
        if not 0.0 <= xi <= 1.0:
            raise XiOutOfRange(f"agent {i + 1}: xi={xi!r} not in [0, 1]", i)
        if not internal0 > 0:
            raise NonpositiveInternal0(f"agent {i + 1}: internal0={internal0!r} must be positive", i)
        bound = (1.0 - xi) / beta
        if not (theta > bound and theta > 0):
            raise ThetaTooSmall(
                f"agent {i + 1}: theta={theta!r} must exceed (1 - xi)/beta = {bound!r}", i, bound
            )
    return p


def decay_margin(p: TriggerParams) -> float:
    """k_d = min_i (beta_i - (1 - xi_i)/theta_i); positive for validated dynamic params."""
    a = p.arrays()
    return float(np.min(a["beta"] - (1.0 - a["xi"]) / a["theta"]))


def static_check(e, q, sigma, l_ii):
    """Fire when e^2 > sigma/(2 L_ii) * q. Works elementwise on arrays."""
    return np.asarray(e) ** 2 > sigma / (2.0 * np.asarray(l_ii)) * np.asarray(q)


def internal_derivative(internal, q, e, *, sigma, beta, xi, l_ii):
    """d/dt internal = -beta*internal + xi*(sigma/2*q - L_ii*e^2)."""
    return -beta * internal + xi * (0.5 * sigma * q - l_ii * e * e)


def dynamic_check(e, q, internal, *, sigma, theta, l_ii):
    """Fire when theta*(L_ii e^2 - sigma/2 q) > internal.

    A nonpositive internal value can only come from an integration failure,
    since the exact trajectory stays above a positive exponential floor.
    """
    internal = np.asarray(internal)
    if np.any(internal <= 0):
        raise NonpositiveInternal(f"internal variable not positive: {internal!r}")
    e = np.asarray(e)
    return theta * (l_ii * e * e - 0.5 * sigma * np.asarray(q)) > internal


def internal_lower_bound(t, *, internal0, beta, xi, theta):
    """internal0 * exp(-(beta + xi/theta) t)."""
    return internal0 * np.exp(-(beta + xi / theta) * t)


def fires(kind: LawKind, e, signal, internal, params: dict[str, np.ndarray], l_ii) -> np.ndarray:
    """Evaluate the law for every agent. ``signal`` is q or q_hat to match ``kind``."""
    if kind.is_dynamic:
        return dynamic_check(e, signal, internal, sigma=params["sigma"], theta=params["theta"], l_ii=l_ii)
    return static_check(e, signal, params["sigma"], l_ii)
