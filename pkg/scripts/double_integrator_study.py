"""Minimum-support controls for the double-integrator benchmark.

Runs the plain l1 baseline and the six catalog penalties from one initial
state, prints a comparison table, and drops per-run trajectory CSVs ready
for plotting.  The optimal support measure for the default start (1, -1)
over horizon 5 is 1; all runs should land on the unit indicator over
[0.5, 1.5) up to grid resolution.

Usage: python scripts/double_integrator_study.py [--n 1000] [--output DIR]
"""

import argparse
import math
import time
from pathlib import Path

import numpy as np

from handsoff.cli import write_trajectory_csv
from handsoff.dca import DcaConfig, SplitControl, l0_measure, recombine, run_dca
from handsoff.lp import LpProblem, solve_lp
from handsoff.oracle import double_integrator_certificate
from handsoff.penalty import Penalty, equivalence_constant
from handsoff.system import ControlProblem, build_discrete, double_integrator, simulate

PENALTIES = [
    Penalty("lp", 0.8, p=0.5),
    Penalty("mcp", 1.0, alpha=0.5),
    Penalty("scad", 0.25, alpha=3.0),
    Penalty("lsp", 0.1 / math.log(1.0 + 1.0e6), alpha=1e-6),
    Penalty("capped_l1", 0.8, alpha=0.5),
    Penalty("l1l2", 0.1),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1000, help="grid size (default 1000)")
    ap.add_argument("--output", default="results/double_integrator",
                    help="directory for trajectory CSVs")
    ap.add_argument("--warm-start", default="l1", choices=("zero", "l1"))
    args = ap.parse_args()

    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    prob = ControlProblem(double_integrator(), np.array([1.0, -1.0]), 5.0)
    dp = build_discrete(prob, args.n)
    cfg = DcaConfig(warm_start=args.warm_start)

    header = f"{'penalty':<12} {'l0':>8} {'J_d':>10} {'c':>8} {'iters':>5} {'lp':>3} {'bob dev':>9} {'cert':>5} {'sec':>6}"
    print(header)
    print("-" * len(header))

    t0 = time.perf_counter()
    sol = solve_lp(LpProblem(np.ones(2 * dp.N), dp.Phi, -dp.zeta))
    wall = time.perf_counter() - t0
    u_l1 = recombine(SplitControl(dp.delta, dp.N, 1, np.clip(sol.z, 0.0, 1.0)))
    rep = double_integrator_certificate(u_l1, prob.x0, 5.0)
    write_trajectory_csv(outdir / "trajectory_l1.csv", u_l1, simulate(dp, prob.x0, sol.z))
    print(f"{'l1':<12} {l0_measure(u_l1):>8.4f} {sol.objective:>10.5f} {'':>8} "
          f"{1:>5} {1:>3} {'':>9} {'pass' if rep.passed else 'fail':>5} {wall:>6.2f}")

    for pen in PENALTIES:
        t0 = time.perf_counter()
        res = run_dca(dp, pen, cfg)
        wall = time.perf_counter() - t0
        rep = double_integrator_certificate(res.u_star, prob.x0, 5.0)
        write_trajectory_csv(outdir / f"trajectory_{pen.kind}.csv", res.u_star,
                             simulate(dp, prob.x0, res.z_star.z))
        print(f"{pen.kind:<12} {res.l0:>8.4f} {res.cost_history[-1]:>10.5f} "
              f"{equivalence_constant(pen):>8.4f} {res.iterations:>5} "
              f"{res.lp_solves:>3} {res.bob_deviation:>9.2e} "
              f"{'pass' if rep.passed else 'fail':>5} {wall:>6.2f}")

    print(f"\ntrajectories written to {outdir}/")


if __name__ == "__main__":
    main()
