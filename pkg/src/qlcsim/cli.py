"""Command-line front end.

Two subcommands mirror the two library entry points:

  qlcsim run   --config cfg --algo qlc --seed 7 --out results/
  qlcsim sweep --config cfg --lambda-from 5e-7 --lambda-to 2e-5 \
               --steps 8 --seeds 10 --out results/

`run` executes one experiment (all episodes) and writes per-episode metrics
and conflict CSVs plus the final Q-tables. `sweep` runs the offered-load
grid over all four algorithms and writes the aggregated sweep.csv.
"""

import argparse
import os
import sys

import numpy as np

from .config import ALGORITHMS, load_config
from .harness import run_experiment, run_sweep, save_qtables, write_sweep_csv
from .metrics import write_conflict_csv, write_metrics_csv


def build_parser():
    parser = argparse.ArgumentParser(prog="qlcsim",
                                     description="Network-slice auto-scaling simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment and write its outputs")
    p_run.add_argument("--config", metavar="PATH", default=None,
                       help="flat key = value config file")
    p_run.add_argument("--algo", choices=ALGORITHMS, default=None,
                       help="override the configured algorithm")
    p_run.add_argument("--seed", type=int, default=None, metavar="N",
                       help="override the configured master seed")
    p_run.add_argument("--out", required=True, metavar="DIR",
                       help="directory for metrics/conflict/Q-table CSVs")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep offered load over all algorithms")
    p_sweep.add_argument("--config", metavar="PATH", default=None)
    p_sweep.add_argument("--lambda-from", type=float, required=True, metavar="X",
                         help="lowest per-user request rate (1/s)")
    p_sweep.add_argument("--lambda-to", type=float, required=True, metavar="Y",
                         help="highest per-user request rate (1/s)")
    p_sweep.add_argument("--steps", type=int, required=True, metavar="K",
                         help="number of evenly spaced rate points")
    p_sweep.add_argument("--seeds", type=int, required=True, metavar="N",
                         help="number of independent seeds per cell")
    p_sweep.add_argument("--workers", type=int, default=None, metavar="W",
                         help="worker processes (default: CPU count)")
    p_sweep.add_argument("--out", required=True, metavar="DIR")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def cmd_run(args):
    overrides = {}
    if args.algo is not None:
        overrides["algorithm"] = args.algo
    if args.seed is not None:
        overrides["seed"] = args.seed
    cfg = load_config(args.config, **overrides)
    os.makedirs(args.out, exist_ok=True)
    results = run_experiment(cfg)
    for e, res in enumerate(results, start=1):
        write_metrics_csv(os.path.join(args.out, f"metrics_ep{e:02d}.csv"),
                          res.metrics, cfg.n_nfs)
        write_conflict_csv(os.path.join(args.out, f"conflicts_ep{e:02d}.csv"),
                           res.conflict_log)
    final = results[-1]
    if final.qtables is not None:
        save_qtables(final.qtables, args.out)
    T = cfg.episode_duration
    print(f"{cfg.algorithm}: final episode served {final.totals.admitted / T:.4f}/s "
          f"of {final.totals.offered / T:.4f}/s offered, "
          f"{final.totals.conflicts} conflicts, allocation {final.final_allocation}")
    print(f"wrote {len(results)} episode(s) to {args.out}")
    return 0


def cmd_sweep(args):
    cfg = load_config(args.config)
    if args.steps < 1 or args.seeds < 1:
        raise ValueError("--steps and --seeds must be at least 1")
    lams = np.linspace(args.lambda_from, args.lambda_to, args.steps)
    # master seeds spaced out so per-episode seeds (seed + index) of
    # different repetitions never overlap
    seeds = [cfg.seed + 1000 * j for j in range(args.seeds)]
    rows = run_sweep(cfg, lams, seeds, workers=args.workers)
    os.makedirs(args.out, exist_ok=True)
    out_csv = os.path.join(args.out, "sweep.csv")
    write_sweep_csv(out_csv, rows)
    for r in rows:
        print(f"lambda_in={r.lambda_in:.4f}/s {r.algo:>5}: "
              f"served {r.lambda_out_mean:.4f} +- {r.lambda_out_ci95:.4f}, "
              f"REI {r.rei_mean:.3f} +- {r.rei_ci95:.3f}")
    print(f"wrote {out_csv}")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
