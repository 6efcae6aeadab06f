"""Print the oracle-derived constants that the test suite freezes.

    python scripts/freeze_constants.py
"""

import dataclasses

from etconsensus.experiment import load_config
from etconsensus.graph import laplacian
from etconsensus.metrics import dynamic_decay_rate, static_decay_rate_broadcast
from etconsensus.oracle import OracleConfig, polynomial_eigenvalues, reference_run
from etconsensus.simulator import run
from etconsensus.triggering import ALL_LAWS


def main():
    cfg = load_config("paper_fig2.cfg")
    lap = laplacian(cfg.graph)
    eig = polynomial_eigenvalues(lap)
    print("four-agent Laplacian eigenvalues (characteristic polynomial):", [repr(float(v)) for v in eig])
    rho2, norm = float(eig[1]), float(eig[-1])
    print("rho2 =", repr(rho2), " ||L|| =", repr(norm))
    print("static continuous rate =", repr(0.5 * rho2))
    print("static broadcast rate  =", repr(static_decay_rate_broadcast(lap, 0.5)))
    for law in ALL_LAWS[1::2]:
        print(f"{law.value} rate =", repr(dynamic_decay_rate(law, lap, cfg.params)))

    print("\nfirst post-initial event, dense reference on [0, 0.2]:")
    for law in ALL_LAWS:
        short = dataclasses.replace(cfg, law=law, t_final=0.2)
        ref = reference_run(OracleConfig(short))
        first = ref.events[cfg.n]
        print(f"  {law.value}: agent {first.agent + 1} at t={first.time:.6f}")

    print("\nevent counts on [0, 10]:")
    for law in ALL_LAWS:
        res = run(dataclasses.replace(cfg, law=law))
        print(f"  {law.value}: {res.summary.event_counts} total {sum(res.summary.event_counts)}")

    for name in ("pair.cfg", "path3.cfg"):
        base = load_config(name)
        print(f"\n{name} compare counts on [0, {base.t_final:g}] (simulator / dense reference):")
        for law in ALL_LAWS:
            c = dataclasses.replace(base, law=law)
            print(f"  {law.value}: {run(c).summary.event_counts} / "
                  f"{reference_run(OracleConfig(c)).summary.event_counts}")


if __name__ == "__main__":
    main()
