"""Dump penalty and gap-function profiles for the six catalog penalties.

Writes one CSV per penalty with columns u, psi, phi, subgradient on a
uniform grid over [-1, 1] (the subgradient column only covers [0, 1] and is
blank for u < 0), and prints the equivalence constant of each penalty.

Usage: python scripts/penalty_profiles.py [--grid 1001] [--output DIR]
"""

import argparse
import math
from pathlib import Path

import numpy as np

from handsoff.penalty import Penalty, equivalence_constant, phi, phi_subgradient, psi

PENALTIES = [
    Penalty("lp", 0.8, p=0.5),
    Penalty("mcp", 0.25, alpha=2.0),
    Penalty("scad", 0.25, alpha=3.0),
    Penalty("lsp", 0.5 / math.log(1.0 + 1.0e6), alpha=1e-6),
    Penalty("capped_l1", 0.8, alpha=0.5),
    Penalty("l1l2", 0.6),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=1001, help="points over [-1, 1]")
    ap.add_argument("--output", default="results/penalties")
    args = ap.parse_args()

    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    u = np.linspace(-1.0, 1.0, args.grid)
    pos = u >= 0.0

    print(f"{'penalty':<12} {'lambda':>10} {'alpha':>8} {'p':>5} {'psi(1)=c':>9}")
    for pen in PENALTIES:
        sub = np.full(u.shape, np.nan)
        sub[pos] = phi_subgradient(pen, u[pos])
        rows = ["u,psi,phi,subgradient"]
        for k in range(u.size):
            cell = "" if math.isnan(sub[k]) else format(sub[k], ".17g")
            rows.append(f"{u[k]:.17g},{psi(pen, u[k]):.17g},{phi(pen, u[k]):.17g},{cell}")
        path = outdir / f"profile_{pen.kind}.csv"
        path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        print(f"{pen.kind:<12} {pen.lam:>10.6f} "
              f"{pen.alpha if pen.alpha is not None else '':>8} "
              f"{pen.p if pen.p is not None else '':>5} "
              f"{equivalence_constant(pen):>9.4f}")

    print(f"\nprofiles written to {outdir}/")


if __name__ == "__main__":
    main()
