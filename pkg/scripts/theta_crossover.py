"""Reward and punishment cost against theta, with the crossover at -delta.

Writes one CSV per (game, N, beta) into ``--outdir``.
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from incentive_cost import DonationGame, PopulationConfig, PublicGoodsGame, delta, expected_cost

SETTINGS = [
    ("dg", DonationGame(2, 1), 3),
    ("dg", DonationGame(2, 1), 50),
    ("pgg", PublicGoodsGame(3, 5, 1), 50),
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", type=Path, default=Path("results/theta_crossover"))
    ap.add_argument("--betas", type=float, nargs="+", default=[0.1, 1.0, 10.0])
    ap.add_argument("--theta-max", type=float, default=5.0)
    ap.add_argument("--points", type=int, default=501)
    args = ap.parse_args(argv)
    args.outdir.mkdir(parents=True, exist_ok=True)

    thetas = np.linspace(0, args.theta_max, args.points)
    for label, game, N in SETTINGS:
        for beta in args.betas:
            pop = PopulationConfig(N, beta)
            path = args.outdir / f"{label}_N{N}_beta{beta:g}.csv"
            with path.open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["theta", "E_reward", "E_punishment"])
                for t in thetas:
                    w.writerow([f"{t:.6g}", f"{expected_cost(game, pop, 'reward', t):.10g}",
                                f"{expected_cost(game, pop, 'punishment', t):.10g}"])
            print(f"{path}  (crossover expected at theta = {-delta(game, N):.6g})")


if __name__ == "__main__":
    main()
