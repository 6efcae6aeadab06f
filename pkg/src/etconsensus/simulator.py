"""Event-driven simulation of the closed loop.

Between events every control is constant, so states advance exactly as
``x + h*u``. The internal variables obey a linear ODE whose forcing is a
quadratic polynomial in elapsed time over such an interval; it is solved in
closed form with exponential-integrator phi functions. Trigger instants are
located by bisection on each macro-step, and simulated trigger times are upper
approximations (within ``event_tol``) of the ideal ones.
"""

from __future__ import annotations

import math
import time as _time
from dataclasses import dataclass, field

import numpy as np

from .dynamics import AgentState, control_inputs, local_disagreements
from .errors import NumericalFailure, ValidationError, ZenoGuard
from .graph import WeightedGraph, laplacian
from .metrics import inter_event_stats, lyapunov_v
from .triggering import LawKind, TriggerParams, fires, validate_params

ZENO_STREAK = 10
MAX_BISECTIONS = 60


@dataclass(frozen=True)
class SimConfig:
    graph: WeightedGraph
    x0: tuple[float, ...] | None
    law: LawKind
    params: TriggerParams
    t_final: float = 10.0
    dt: float = 1e-3
    event_tol: float = 1e-9
    sample_stride: int = 10
    zeno_floor: float = 1e-7
    seed: int | None = None
    x0_range: tuple[float, float] = (-10.0, 10.0)

    def __post_init__(self):
        if self.x0 is not None:
            object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))
        object.__setattr__(self, "x0_range", tuple(float(v) for v in self.x0_range))

    @property
    def n(self) -> int:
        return self.graph.n

    def initial_state(self) -> np.ndarray:
        """x0 as given, or drawn uniformly from ``x0_range`` with ``seed``."""
        if self.x0 is not None:
            return np.array(self.x0, dtype=float)
        lo, hi = self.x0_range
        return np.random.default_rng(self.seed).uniform(lo, hi, self.n)


def validate_config(cfg: SimConfig) -> SimConfig:
    n = cfg.graph.n
    if cfg.x0 is None and cfg.seed is None:
        raise ValidationError("either x0 or seed must be given")
    if cfg.x0 is not None:
        if len(cfg.x0) != n:
            raise ValidationError(f"x0 has {len(cfg.x0)} entries for {n} agents")
        if not all(math.isfinite(v) for v in cfg.x0):
            raise ValidationError("x0 entries must be finite")
    lo, hi = cfg.x0_range
    if not lo < hi:
        raise ValidationError(f"x0 range [{lo}, {hi}] is empty")
    if cfg.params.n != n:
        raise ValidationError(f"parameters given for {cfg.params.n} agents, graph has {n}")
    validate_params(cfg.params, cfg.law)
    for name in ("t_final", "dt", "event_tol", "zeno_floor"):
        value = getattr(cfg, name)
        if not (math.isfinite(value) and value > 0):
            raise ValidationError(f"{name}={value!r} must be positive and finite")
    if cfg.dt > cfg.t_final:
        raise ValidationError(f"dt={cfg.dt} exceeds t_final={cfg.t_final}")
    if not cfg.event_tol < cfg.dt:
        raise ValidationError(f"event_tol={cfg.event_tol} must be below dt={cfg.dt}")
    if not cfg.zeno_floor < cfg.dt:
        raise ValidationError(f"zeno_floor={cfg.zeno_floor} must be below dt={cfg.dt}")
    if int(cfg.sample_stride) != cfg.sample_stride or cfg.sample_stride < 1:
        raise ValidationError(f"sample_stride={cfg.sample_stride!r} must be an integer >= 1")
    return cfg


@dataclass(frozen=True)
class EventRecord:
    agent: int
    time: float
    sequence_number: int
    broadcast_value: float


@dataclass(frozen=True)
class RunSummary:
    final_error: float
    event_counts: tuple[int, ...]
    min_gap: float | None
    mean_gap: float | None
    n_samples: int
    n_events: int
    completed: bool
    wall_time: float = field(compare=False, default=0.0)


@dataclass(eq=False)
class SimResult:
    law: LawKind
    mean0: float
    times: np.ndarray
    x: np.ndarray
    x_hat: np.ndarray
    internal: np.ndarray
    V: np.ndarray
    W_or_F: np.ndarray
    events: list[EventRecord]
    summary: RunSummary

    def identical_to(self, other: "SimResult") -> bool:
        """Bit-for-bit equality of everything except wall time."""
        arrays = ("times", "x", "x_hat", "internal", "V", "W_or_F")
        return (
            self.law is other.law
            and self.mean0 == other.mean0
            and all(np.array_equal(getattr(self, a), getattr(other, a), equal_nan=True) for a in arrays)
            and self.events == other.events
            and self.summary == other.summary
        )


_INV_FACT = [1.0 / math.factorial(m) for m in range(25)]


def _phi(z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """phi_1, phi_2, phi_3 of the exponential integrator, elementwise for z <= 0."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 0.1
    # Horner form of sum_m z^m / (m + k)!; 12 terms reach roundoff for |z| < 0.1
    series = []
    for k in (1, 2, 3):
        acc = np.zeros_like(z)
        for m in range(11, -1, -1):
            acc = acc * z + _INV_FACT[m + k]
        series.append(acc)
    zs = np.where(small, -1.0, z)
    ez = np.exp(zs)
    closed = (
        (ez - 1.0) / zs,
        (ez - 1.0 - zs) / (zs * zs),
        (ez - 1.0 - zs - 0.5 * zs * zs) / (zs * zs * zs),
    )
    return tuple(np.where(small, a, b) for a, b in zip(series, closed))


@dataclass
class SimState:
    t: float
    x: np.ndarray
    x_hat: np.ndarray
    internal: np.ndarray
    last_trigger: np.ndarray

    def agent(self, i: int) -> AgentState:
        return AgentState(float(self.x[i]), float(self.x_hat[i]), float(self.last_trigger[i]), float(self.internal[i]))

    def copy(self) -> "SimState":
        return SimState(self.t, self.x.copy(), self.x_hat.copy(), self.internal.copy(), self.last_trigger.copy())


class ClosedLoop:
    """Integrates one graph under one triggering law and handles its events."""

    def __init__(self, graph: WeightedGraph, law: LawKind, params: TriggerParams, *,
                 event_tol: float = 1e-9, zeno_floor: float = 1e-7):
        self.lap = np.array(laplacian(graph))
        self.adj = np.array(graph.weights)
        self.l_ii = np.diag(self.lap).copy()
        self.law = law
        self.params = params.arrays()
        self.event_tol = event_tol
        self.zeno_floor = zeno_floor
        self.n = graph.n
        self._short_streak = np.zeros(self.n, dtype=int)
        self._phi_cache: dict[float, tuple] = {}

    def signal(self, x, x_hat) -> np.ndarray:
        return local_disagreements(self.lap, x_hat if self.law.uses_broadcast else x)

    def fired(self, s: SimState) -> np.ndarray:
        return fires(self.law, s.x_hat - s.x, self.signal(s.x, s.x_hat), s.internal, self.params, self.l_ii)

    def integrate_step(self, s: SimState, h: float) -> SimState:
        """Advance by h assuming no event inside (t, t+h]."""
        u = control_inputs(self.lap, s.x_hat)
        x_new = s.x + h * u
        internal = s.internal
        if self.law.is_dynamic and h > 0:
            internal = self._internal_step(s, u, h)
        if not (np.all(np.isfinite(x_new)) and np.all(np.isfinite(internal))):
            raise NumericalFailure(f"non-finite state at t={s.t + h!r}")
        return SimState(s.t + h, x_new, s.x_hat, internal, s.last_trigger)

    def _internal_step(self, s: SimState, u: np.ndarray, h: float) -> np.ndarray:
        p = self.params
        e0 = s.x_hat - s.x
        # e(tau) = e0 - tau*u, so e^2 = e0^2 - 2 e0 u tau + u^2 tau^2
        if self.law.uses_broadcast:
            q0 = local_disagreements(self.lap, s.x_hat)
            q1 = q2 = np.zeros(self.n)
        else:
            d = s.x[None, :] - s.x[:, None]
            du = u[None, :] - u[:, None]
            q0 = 0.5 * np.sum(self.adj * d * d, axis=1)
            q1 = np.sum(self.adj * d * du, axis=1)
            q2 = 0.5 * np.sum(self.adj * du * du, axis=1)
        half_sigma = 0.5 * p["sigma"]
        g0 = p["xi"] * (half_sigma * q0 - self.l_ii * e0 * e0)
        g1 = p["xi"] * (half_sigma * q1 + self.l_ii * 2.0 * e0 * u)
        g2 = p["xi"] * (half_sigma * q2 - self.l_ii * u * u)
        coeffs = self._phi_cache.get(h)
        if coeffs is None:
            if len(self._phi_cache) > 256:
                self._phi_cache.clear()
            z = -p["beta"] * h
            coeffs = self._phi_cache[h] = (np.exp(z), *_phi(z))
        ez, p1, p2, p3 = coeffs
        return ez * s.internal + h * p1 * g0 + h * h * p2 * g1 + 2.0 * h ** 3 * p3 * g2

    def _interior_peaks(self, s: SimState, h: float) -> list[float]:
        """Times in (0, h) where some agent's L_ii e^2 - sigma/2 q peaks (continuous laws)."""
        if self.law.uses_broadcast:
            return []
        u = control_inputs(self.lap, s.x_hat)
        e0 = s.x_hat - s.x
        d = s.x[None, :] - s.x[:, None]
        du = u[None, :] - u[:, None]
        half_sigma = 0.5 * self.params["sigma"]
        a = self.l_ii * u * u - half_sigma * 0.5 * np.sum(self.adj * du * du, axis=1)
        b = -2.0 * self.l_ii * e0 * u - half_sigma * np.sum(self.adj * d * du, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            vertex = np.where(a < 0, -b / (2.0 * a), np.nan)
        return sorted(float(v) for v in vertex if 0.0 < v < h)

    def detect_and_localize(self, s: SimState, h: float) -> tuple[float | None, list[int], SimState]:
        """Earliest trigger in (t, t+h] to within event_tol, plus every agent firing then.

        Returns ``(None, [], end_state)`` when nothing fires by t+h. Otherwise
        the time is the upper end of the final bisection bracket, where the
        condition has really fired. The returned state belongs to that time.
        """
        end = self.integrate_step(s, h)
        hi = None
        # A continuous-law gap can rise and fall inside one step; probe the
        # peaks of its quadratic part before the step end.
        for probe in self._interior_peaks(s, h):
            if self.fired(self.integrate_step(s, probe)).any():
                hi = probe
                break
        if hi is None:
            if not self.fired(end).any():
                return None, [], end
            hi = h
        lo = 0.0
        for _ in range(MAX_BISECTIONS):
            if hi - lo <= self.event_tol:
                break
            mid = 0.5 * (lo + hi)
            if self.fired(self.integrate_step(s, mid)).any():
                hi = mid
            else:
                lo = mid
        at_state = self.integrate_step(s, hi)
        at = self.fired(at_state)
        # agents crossing within event_tol after the localized instant fire with it
        probe = min(hi + self.event_tol, h)
        if probe > hi:
            at |= self.fired(self.integrate_step(s, probe))
        return s.t + hi, [int(i) for i in np.flatnonzero(at)], at_state

    def apply_event(self, s: SimState, agent: int, t: float, events: list[EventRecord],
                    counts: list[int]) -> None:
        """Broadcast agent's current state at time t (in place) and log the event."""
        gap = t - s.last_trigger[agent]
        if gap < self.zeno_floor:
            self._short_streak[agent] += 1
        else:
            self._short_streak[agent] = 0
        s.x_hat = s.x_hat.copy()
        s.x_hat[agent] = s.x[agent]
        s.last_trigger = s.last_trigger.copy()
        s.last_trigger[agent] = t
        counts[agent] += 1
        events.append(EventRecord(agent, t, counts[agent], float(s.x[agent])))
        if self._short_streak[agent] >= ZENO_STREAK:
            raise ZenoGuard(
                f"agent {agent + 1}: {ZENO_STREAK} consecutive inter-event gaps below "
                f"zeno_floor={self.zeno_floor!r} (last at t={t!r})", agent, t)

    def fire_cascade(self, s: SimState, first: list[int], events, counts) -> None:
        """Apply simultaneous events, then any triggered by the new broadcasts at the same instant."""
        pending = list(first)
        while pending:
            for i in pending:
                self.apply_event(s, i, s.t, events, counts)
            pending = [int(i) for i in np.flatnonzero(self.fired(s))]


class _Recorder:
    def __init__(self, law: LawKind, mean0: float):
        self.law = law
        self.mean0 = mean0
        self.rows: list[tuple] = []

    def record(self, s: SimState) -> None:
        if self.rows and s.t <= self.rows[-1][0]:
            return
        v = lyapunov_v(s.x, self.mean0)
        wf = v + float(s.internal.sum()) if self.law.is_dynamic else math.nan
        self.rows.append((s.t, s.x.copy(), s.x_hat.copy(), s.internal.copy(), v, wf))

    def result(self, events, n, started, completed) -> SimResult:
        times = np.array([r[0] for r in self.rows])
        x = np.array([r[1] for r in self.rows])
        stats = inter_event_stats(events, n)
        final_error = float(np.max(np.abs(x[-1] - self.mean0)))
        summary = RunSummary(final_error, stats.counts, stats.min_gap, stats.mean_gap,
                             len(self.rows), len(events), completed, _time.perf_counter() - started)
        return SimResult(
            law=self.law, mean0=self.mean0, times=times, x=x,
            x_hat=np.array([r[2] for r in self.rows]),
            internal=np.array([r[3] for r in self.rows]),
            V=np.array([r[4] for r in self.rows]),
            W_or_F=np.array([r[5] for r in self.rows]),
            events=events, summary=summary)


def run(config: SimConfig) -> SimResult:
    """Simulate [0, t_final]. Every agent triggers at t=0."""
    validate_config(config)
    started = _time.perf_counter()
    n = config.n
    x0 = config.initial_state()
    mean0 = float(np.mean(x0))
    loop = ClosedLoop(config.graph, config.law, config.params,
                      event_tol=config.event_tol, zeno_floor=config.zeno_floor)
    internal0 = np.array(config.params.internal0) if config.law.is_dynamic else np.zeros(n)
    state = SimState(0.0, x0.copy(), x0.copy(), internal0, np.zeros(n))
    events: list[EventRecord] = []
    counts = [0] * n
    rec = _Recorder(config.law, mean0)

    for i in range(n):
        counts[i] = 1
        events.append(EventRecord(i, 0.0, 1, float(x0[i])))
    rec.record(state)

    n_steps = max(1, math.ceil(config.t_final / config.dt - 1e-9))
    try:
        for k in range(n_steps):
            t_end = config.t_final if k == n_steps - 1 else (k + 1) * config.dt
            while state.t < t_end:
                h = t_end - state.t
                t_event, agents, state = loop.detect_and_localize(state, h)
                if t_event is None:
                    state.t = t_end
                    break
                state.t = t_event
                loop.fire_cascade(state, agents, events, counts)
                rec.record(state)
            if (k + 1) % config.sample_stride == 0 or k == n_steps - 1:
                rec.record(state)
    except ZenoGuard as exc:
        rec.record(state)
        exc.partial = rec.result(events, n, started, completed=False)
        raise
    return rec.result(events, n, started, completed=True)
