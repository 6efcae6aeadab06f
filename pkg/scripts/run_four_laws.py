"""Run the four bundled four-agent experiments and print a summary table.

    python scripts/run_four_laws.py --out out/four_laws

Each law writes the usual CLI artifacts into its own output directory. The
table shows per-agent event counts next to the smallest inter-event gap and
the final distance from the initial average.
"""

import argparse
import dataclasses
from pathlib import Path

from etconsensus import report
from etconsensus.experiment import load_config
from etconsensus.simulator import run

CONFIGS = ("paper_fig2.cfg", "paper_fig3.cfg", "paper_fig4.cfg", "paper_fig5.cfg")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("out/four_laws"))
    ap.add_argument("--t-final", type=float, default=None)
    args = ap.parse_args()

    print(f"{'law':<20} {'counts':<22} {'total':>6} {'min gap':>10} {'final err':>10} {'wall s':>7}")
    for name in CONFIGS:
        cfg = load_config(name)
        if args.t_final is not None:
            cfg = dataclasses.replace(cfg, t_final=args.t_final)
        result = run(cfg)
        summary = report.write_run(args.out / cfg.law.value, cfg, result)
        gap = summary["min_gap"]
        print(f"{cfg.law.value:<20} {str(summary['event_counts']):<22} {summary['total_events']:>6} "
              f"{'n/a' if gap is None else f'{gap:.2e}':>10} {summary['final_error']:>10.2e} "
              f"{summary['wall_time']:>7.2f}")


if __name__ == "__main__":
    main()
