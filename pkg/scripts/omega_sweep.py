"""Optimal incentive across cooperation targets, above and below the threshold beta*."""
import argparse
import csv
import warnings
from pathlib import Path

import numpy as np

from incentive_cost import DonationGame, PopulationConfig, PublicGoodsGame
from incentive_cost.phase import beta_star, optimize

SETTINGS = [
    ("dg", DonationGame(1.8, 1), 3),
    ("dg", DonationGame(1.8, 1), 50),
    ("pgg", PublicGoodsGame(3, 5, 1), 50),
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", type=Path, default=Path("results/omega_sweep"))
    ap.add_argument("--scheme", choices=("reward", "punishment"), default="reward")
    ap.add_argument("--multipliers", type=float, nargs="+", default=[0.5, 2.0],
                    help="beta as multiples of beta*")
    args = ap.parse_args(argv)
    args.outdir.mkdir(parents=True, exist_ok=True)

    omegas = np.round(np.arange(0.01, 1.0, 0.01), 2)
    for label, game, N in SETTINGS:
        bstar = beta_star(game, N, args.scheme)
        for m in args.multipliers:
            pop = PopulationConfig(N, m * bstar)
            path = args.outdir / f"{label}_N{N}_{args.scheme}_beta{m:g}x.csv"
            with path.open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["omega", "beta", "theta_star", "cost_star", "branch", "theta0", "theta2"])
                for omega in omegas:
                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore")
                        r = optimize(game, pop, args.scheme, float(omega))
                    w.writerow([omega, f"{pop.beta:.8g}", f"{r.theta_star:.10g}", f"{r.cost_star:.10g}",
                                r.branch.value, f"{r.theta0:.10g}",
                                "" if r.theta2 is None else f"{r.theta2:.10g}"])
            print(f"{path}  (beta* = {bstar:.6g})")


if __name__ == "__main__":
    main()
