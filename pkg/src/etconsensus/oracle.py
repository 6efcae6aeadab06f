"""Brute-force references for cross-checking the simulator and the eigensolver.

Nothing here reuses the simulator or graph numerics: the dense run is a
forward-Euler loop compiled with numba that tests the raw trigger inequality
on every step, and the eigenvalues come from the characteristic polynomial
built in exact rational arithmetic.
"""

from __future__ import annotations

import math
import time as _time
from dataclasses import dataclass
from fractions import Fraction

import numba
import numpy as np

from .errors import NumericalFailure, ValidationError
from .simulator import EventRecord, RunSummary, SimConfig, SimResult, validate_config
from .triggering import ALL_LAWS


@dataclass(frozen=True)
class OracleConfig:
    base: SimConfig
    dense_dt: float = 1e-6
    sample_every: int = 1000
    max_events: int = 200_000

    def __post_init__(self):
        if not 0 < self.dense_dt <= self.base.dt / 100:
            raise ValidationError(f"dense_dt={self.dense_dt} must be in (0, dt/100]")


@numba.njit(cache=True)
def _dense_loop(lap, x0, law, sigma, beta, xi, theta, internal0, n_steps, dense_dt,
                sample_every, max_events):
    n = x0.shape[0]
    dynamic = law == 1 or law == 3
    broadcast = law == 2 or law == 3
    x = x0.copy()
    xh = x0.copy()
    eta = internal0.copy() if dynamic else np.zeros(n)
    u = np.zeros(n)
    q = np.zeros(n)
    fire = np.zeros(n, dtype=np.bool_)

    ev_agent = np.empty(max_events, dtype=np.int64)
    ev_time = np.empty(max_events)
    ev_value = np.empty(max_events)
    n_ev = 0
    n_samples = n_steps // sample_every + 2
    s_t = np.empty(n_samples)
    s_x = np.empty((n_samples, n))
    s_xh = np.empty((n_samples, n))
    s_eta = np.empty((n_samples, n))
    n_s = 0

    for i in range(n):
        ev_agent[n_ev] = i
        ev_time[n_ev] = 0.0
        ev_value[n_ev] = x[i]
        n_ev += 1
    s_t[0] = 0.0
    s_x[0] = x
    s_xh[0] = xh
    s_eta[0] = eta
    n_s = 1

    for k in range(n_steps):
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc -= lap[i, j] * xh[j]
            u[i] = acc
        if dynamic:
            for i in range(n):
                qi = 0.0
                for j in range(n):
                    d = (xh[j] - xh[i]) if broadcast else (x[j] - x[i])
                    qi -= 0.5 * lap[i, j] * d * d
                e = xh[i] - x[i]
                eta[i] += dense_dt * (-beta[i] * eta[i] + xi[i] * (0.5 * sigma[i] * qi - lap[i, i] * e * e))
        for i in range(n):
            x[i] += dense_dt * u[i]
        t = (k + 1) * dense_dt

        # fire, then re-check: a new broadcast can violate a neighbour's condition at once
        while True:
            any_fire = False
            for i in range(n):
                qi = 0.0
                for j in range(n):
                    d = (xh[j] - xh[i]) if broadcast else (x[j] - x[i])
                    qi -= 0.5 * lap[i, j] * d * d
                q[i] = qi
            for i in range(n):
                e = xh[i] - x[i]
                if dynamic:
                    fire[i] = theta[i] * (lap[i, i] * e * e - 0.5 * sigma[i] * q[i]) > eta[i]
                else:
                    fire[i] = e * e > sigma[i] / (2.0 * lap[i, i]) * q[i]
                any_fire = any_fire or fire[i]
            if not any_fire:
                break
            for i in range(n):
                if fire[i]:
                    if n_ev >= max_events:
                        return -1, ev_agent, ev_time, ev_value, n_s, s_t, s_x, s_xh, s_eta
                    xh[i] = x[i]
                    ev_agent[n_ev] = i
                    ev_time[n_ev] = t
                    ev_value[n_ev] = x[i]
                    n_ev += 1

        for i in range(n):
            if not (math.isfinite(x[i]) and math.isfinite(eta[i])):
                return -2, ev_agent, ev_time, ev_value, n_s, s_t, s_x, s_xh, s_eta
        if (k + 1) % sample_every == 0 or k == n_steps - 1:
            s_t[n_s] = t
            s_x[n_s] = x
            s_xh[n_s] = xh
            s_eta[n_s] = eta
            n_s += 1
    return n_ev, ev_agent, ev_time, ev_value, n_s, s_t, s_x, s_xh, s_eta


def reference_run(cfg: OracleConfig) -> SimResult:
    """Dense forward-Euler run; an event fires on the first grid step that violates its law."""
    base = validate_config(cfg.base)
    started = _time.perf_counter()
    w = np.array(base.graph.weights, dtype=float)
    lap = -w
    for i in range(w.shape[0]):
        lap[i, i] = w[i].sum()
    x0 = base.initial_state()
    a = base.params.arrays()
    n_steps = int(round(base.t_final / cfg.dense_dt))
    n_ev, ev_agent, ev_time, ev_value, n_s, s_t, s_x, s_xh, s_eta = _dense_loop(
        lap, x0, ALL_LAWS.index(base.law), a["sigma"], a["beta"], a["xi"], a["theta"],
        a["internal0"], n_steps, cfg.dense_dt, cfg.sample_every, cfg.max_events)
    if n_ev == -1:
        raise NumericalFailure(f"reference run exceeded {cfg.max_events} events")
    if n_ev == -2:
        raise NumericalFailure("reference run produced non-finite values")

    n = x0.shape[0]
    mean0 = float(np.mean(x0))
    seq = [0] * n
    events = []
    gaps: list[float] = []
    last = [0.0] * n
    for k in range(n_ev):
        i = int(ev_agent[k])
        seq[i] += 1
        if seq[i] > 1:
            gaps.append(float(ev_time[k]) - last[i])
        last[i] = float(ev_time[k])
        events.append(EventRecord(i, float(ev_time[k]), seq[i], float(ev_value[k])))

    times = s_t[:n_s].copy()
    x = s_x[:n_s].copy()
    internal = s_eta[:n_s].copy()
    dev = x - mean0
    v = 0.5 * np.sum(dev * dev, axis=1)
    wf = v + internal.sum(axis=1) if base.law.is_dynamic else np.full(n_s, np.nan)
    summary = RunSummary(
        final_error=float(np.max(np.abs(x[-1] - mean0))),
        event_counts=tuple(seq),
        min_gap=min(gaps) if gaps else None,
        mean_gap=sum(gaps) / len(gaps) if gaps else None,
        n_samples=n_s, n_events=n_ev, completed=True,
        wall_time=_time.perf_counter() - started)
    return SimResult(base.law, mean0, times, x, s_xh[:n_s].copy(), internal, v, wf, events, summary)


def _charpoly(lap) -> list[Fraction]:
    """Coefficients c_0..c_n of det(lambda I - L), exact, by Faddeev-LeVerrier."""
    m = [[Fraction(float(v)) for v in row] for row in np.asarray(lap, dtype=float)]
    n = len(m)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = L M_{k-1} + c_{n-k+1} I
        prod = [[sum(m[i][r] * mk[r][j] for r in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            prod[i][i] += coeffs[n - k + 1]
        mk = prod
        lm = [[sum(m[i][r] * mk[r][j] for r in range(n)) for j in range(n)] for i in range(n)]
        coeffs[n - k] = -sum(lm[i][i] for i in range(n)) / k
    return coeffs


def _derivative(coeffs: list[Fraction]) -> list[Fraction]:
    return [coeffs[k] * k for k in range(1, len(coeffs))]


def _horner(coeffs, lam):
    acc = lam * 0
    for c in reversed(coeffs):
        acc = acc * lam + c
    return acc


def _bisect(coeffs_f, lo: float, hi: float, tol: float = 1e-12) -> float:
    flo = _horner(coeffs_f, lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = _horner(coeffs_f, mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def polynomial_eigenvalues(lap, grid: float = 1e-4) -> np.ndarray:
    """Eigenvalues of a small symmetric matrix as roots of det(L - lambda I), ascending.

    Sign changes of p are scanned on a grid over [0, 2 max L_ii] (Gershgorin)
    widened by one grid step each side, then refined by bisection. A root of
    multiplicity m is a simple root of the (m-1)-th derivative, so derivatives
    are scanned too; the multiplicity of each candidate is the number of
    successive derivatives that vanish there. The result must have n values
    summing to trace(L).
    """
    lap = np.asarray(lap, dtype=float)
    n = lap.shape[0]
    if n > 5 or lap.shape != (n, n) or not np.array_equal(lap, lap.T):
        raise ValidationError("polynomial_eigenvalues needs a symmetric matrix with n <= 5")
    hi = 2.0 * float(np.max(np.abs(np.diag(lap)))) + grid
    lam = np.arange(-grid, hi + grid, grid)
    polys = [_charpoly(lap)]
    for _ in range(n - 1):
        polys.append(_derivative(polys[-1]))
    polys_f = [[float(c) for c in p] for p in polys]

    candidates: list[float] = []
    for pf in polys_f:
        vals = _horner(pf, lam)
        candidates.extend(float(r) for r in lam[vals == 0.0])
        for k in np.flatnonzero(vals[:-1] * vals[1:] < 0):
            candidates.append(_bisect(pf, float(lam[k]), float(lam[k + 1])))

    def multiplicity(r: float) -> int:
        mult = 0
        for p in polys:
            value = float(_horner(p, Fraction(r)))
            scale = sum(abs(float(c)) * max(1.0, abs(r)) ** k for k, c in enumerate(p))
            if abs(value) > 1e-9 * scale:
                break
            mult += 1
        return mult

    # candidates closer than a few grid steps describe the same eigenvalue;
    # keep the one that explains the highest multiplicity
    roots: list[float] = []
    cluster: list[float] = []
    for r in sorted(candidates) + [math.inf]:
        if cluster and r - cluster[-1] > 10 * grid:
            best = max(cluster, key=lambda c: (multiplicity(c), -abs(float(_horner(polys[0], Fraction(c))))))
            roots.extend([best] * multiplicity(best))
            cluster = []
        cluster.append(r)
    if len(roots) != n:
        raise NumericalFailure(f"isolated {len(roots)} eigenvalues, expected {n}")
    if abs(sum(roots) - float(np.trace(lap))) > 1e-8 * max(1.0, float(np.trace(lap))):
        raise NumericalFailure("eigenvalue sum disagrees with the trace")
    return np.array(roots)
