"""CSV and summary artifacts for a finished (or aborted) run.

Column orders are fixed:

* trajectory.csv  t, x_1..x_n, then eta_1..eta_n (dynamic-continuous) or
  chi_1..chi_n (dynamic-broadcast)
* events.csv      agent, k, time, broadcast_value   (agent numbered from 1)
* metrics.csv     t, V, W_or_F, envelope            (W_or_F is nan for static laws;
                  envelope bounds V for static laws and W/F for dynamic ones)
* comparison.csv  law, count_1..count_n, total, min_gap, final_error

Numbers are written with 17 significant digits so files are bit-stable.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .experiment import dumps_config
from .graph import fiedler_value, laplacian, spectral_norm
from .metrics import DecayEnvelope, decay_rate
from .simulator import SimConfig, SimResult

CONSENSUS_TOL = 1e-2


def fmt(value) -> str:
    if value is None:
        return ""
    return "%.17g" % value


def envelope_for(cfg: SimConfig, result: SimResult) -> DecayEnvelope:
    lap = laplacian(cfg.graph)
    series = result.W_or_F if cfg.law.is_dynamic else result.V
    return DecayEnvelope(float(series[0]), decay_rate(cfg.law, lap, cfg.params))


def write_trajectory(path: Path, result: SimResult) -> None:
    n = result.x.shape[1]
    header = ["t"] + [f"x_{i + 1}" for i in range(n)]
    dynamic = result.law.is_dynamic
    if dynamic:
        header += [f"{result.law.internal_name}_{i + 1}" for i in range(n)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for k, t in enumerate(result.times):
            row = [fmt(t)] + [fmt(v) for v in result.x[k]]
            if dynamic:
                row += [fmt(v) for v in result.internal[k]]
            w.writerow(row)


def write_events(path: Path, result: SimResult) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["agent", "k", "time", "broadcast_value"])
        for ev in result.events:
            w.writerow([ev.agent + 1, ev.sequence_number, fmt(ev.time), fmt(ev.broadcast_value)])


def write_metrics(path: Path, result: SimResult, env: DecayEnvelope) -> None:
    bound = env(result.times)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "V", "W_or_F", "envelope"])
        for k, t in enumerate(result.times):
            w.writerow([fmt(t), fmt(result.V[k]), fmt(result.W_or_F[k]), fmt(bound[k])])


def summary_dict(cfg: SimConfig, result: SimResult, env: DecayEnvelope) -> dict:
    lap = laplacian(cfg.graph)
    s = result.summary
    functional = ("F" if cfg.law.uses_broadcast else "W") if cfg.law.is_dynamic else "V"
    return {
        "law": cfg.law.value,
        "n": cfg.n,
        "t_final": cfg.t_final,
        "t_end": float(result.times[-1]),
        "completed": s.completed,
        "x0": [float(v) for v in result.x[0]],
        "mean0": result.mean0,
        "final_error": s.final_error,
        "consensus_tol": CONSENSUS_TOL,
        "consensus_reached": s.final_error < CONSENSUS_TOL,
        "event_counts": list(s.event_counts),
        "total_events": s.n_events,
        "min_gap": s.min_gap,
        "mean_gap": s.mean_gap,
        "n_samples": s.n_samples,
        "rates": {
            "rho2": fiedler_value(lap),
            "spectral_norm": spectral_norm(lap),
            "functional": functional,
            "decay_rate": env.rate,
            "initial": env.initial,
        },
        "wall_time": s.wall_time,
        "config": dumps_config(cfg),
    }


def write_run(out: Path, cfg: SimConfig, result: SimResult) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    env = envelope_for(cfg, result)
    write_events(out / "events.csv", result)
    write_trajectory(out / "trajectory.csv", result)
    write_metrics(out / "metrics.csv", result, env)
    summary = summary_dict(cfg, result, env)
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return summary


def comparison_header(n: int) -> list[str]:
    return ["law"] + [f"count_{i + 1}" for i in range(n)] + ["total", "min_gap", "final_error"]


def comparison_row(result: SimResult) -> list[str]:
    s = result.summary
    return ([result.law.value] + [str(c) for c in s.event_counts]
            + [str(int(np.sum(s.event_counts))), fmt(s.min_gap), fmt(s.final_error)])
