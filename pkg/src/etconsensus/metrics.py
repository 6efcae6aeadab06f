"""Lyapunov functionals with their decay rates, plus event statistics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NonpositiveInternal
from .graph import fiedler_value, spectral_norm
from .triggering import LawKind, TriggerParams, decay_margin


def lyapunov_v(x, mean0: float) -> float:
    """V = 1/2 sum_i (x_i - mean0)^2."""
    d = np.asarray(x, dtype=float) - mean0
    return 0.5 * float(d @ d)


def lyapunov_w(v: float, internals) -> float:
    """W = V + sum_i eta_i (continuous dynamic law)."""
    internals = np.asarray(internals, dtype=float)
    if np.any(internals <= 0):
        raise NonpositiveInternal(f"internal variables must be positive, got {internals!r}")
    return float(v + internals.sum())


# F = V + sum_i chi_i has the same form for the broadcast dynamic law.
lyapunov_f = lyapunov_w


def static_decay_rate_continuous(lap, sigma_max: float) -> float:
    return (1.0 - sigma_max) * fiedler_value(lap)


def static_decay_rate_broadcast(lap, sigma_max: float) -> float:
    min_lii = float(np.min(np.diag(lap)))
    norm = spectral_norm(lap)
    return (1.0 - sigma_max) * min_lii / (2.0 * min_lii + norm * sigma_max) * fiedler_value(lap)


def dynamic_decay_rate(kind: LawKind, lap, params: TriggerParams) -> float:
    """k_W for the continuous dynamic law, k_F for the broadcast one."""
    a = params.arrays()
    sigma_max = float(a["sigma"].max())
    rho2 = fiedler_value(lap)
    kd = decay_margin(params)
    if kind is LawKind.DYNAMIC_CONTINUOUS:
        return min((1.0 - sigma_max) * rho2, kd)
    if kind is LawKind.DYNAMIC_BROADCAST:
        lii = np.diag(lap)
        norm = spectral_norm(lap)
        kx = max(
            2.0 + norm * sigma_max / float(lii.min()),
            2.0 * (1.0 - sigma_max) * norm / (kd * float(np.min(a["theta"] * lii))),
        )
        return min(rho2 / kx * (1.0 - sigma_max), kd / 2.0)
    raise ValueError(f"{kind.value} is not a dynamic law")


def decay_rate(kind: LawKind, lap, params: TriggerParams) -> float:
    """Guaranteed exponential rate of the functional the law is analysed with."""
    if kind.is_dynamic:
        return dynamic_decay_rate(kind, lap, params)
    sigma_max = max(params.sigma)
    if kind is LawKind.STATIC_CONTINUOUS:
        return static_decay_rate_continuous(lap, sigma_max)
    return static_decay_rate_broadcast(lap, sigma_max)


@dataclass(frozen=True)
class DecayEnvelope:
    initial: float
    rate: float
    slack: float = 1.0

    def __call__(self, t):
        return self.slack * self.initial * np.exp(-self.rate * np.asarray(t, dtype=float))


class EnvelopeCheck(NamedTuple):
    ok: bool
    index: int | None = None
    time: float | None = None
    value: float | None = None
    bound: float | None = None


def check_envelope(times, values, env: DecayEnvelope) -> EnvelopeCheck:
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    bound = env(times)
    bad = np.flatnonzero(values > bound)
    if bad.size == 0:
        return EnvelopeCheck(True)
    k = int(bad[0])
    return EnvelopeCheck(False, k, float(times[k]), float(values[k]), float(bound[k]))


def is_nonincreasing(values, atol: float) -> bool:
    values = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(values) <= atol))


class EventStats(NamedTuple):
    counts: tuple[int, ...]
    min_gap: float | None
    mean_gap: float | None


def inter_event_stats(events, n: int) -> EventStats:
    """Per-agent event counts and the min/mean gap between an agent's consecutive events.

    Gaps are None when no agent has more than one event.
    """
    per_agent: list[list[float]] = [[] for _ in range(n)]
    for ev in events:
        per_agent[ev.agent].append(ev.time)
    gaps = np.concatenate([np.diff(ts) for ts in per_agent if len(ts) > 1] or [np.empty(0)])
    counts = tuple(len(ts) for ts in per_agent)
    if gaps.size == 0:
        return EventStats(counts, None, None)
    return EventStats(counts, float(gaps.min()), float(gaps.mean()))
