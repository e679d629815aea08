"""Cost against the selection intensity, next to its weak- and strong-selection limits."""
import argparse
import csv
from pathlib import Path

import numpy as np

from incentive_cost import DonationGame, PopulationConfig, PublicGoodsGame, delta, expected_cost
from incentive_cost.asymptotics import large_selection_limit, regime_of, weak_selection_limit

SETTINGS = [
    ("dg", DonationGame(2, 1), 3),
    ("dg", DonationGame(2, 1), 50),
    ("pgg", PublicGoodsGame(3, 5, 1), 50),
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", type=Path, default=Path("results/beta_sweep"))
    ap.add_argument("--thetas", type=float, nargs="+", default=[0.5, 1.0, 3.0])
    ap.add_argument("--log10-min", type=float, default=-4)
    ap.add_argument("--log10-max", type=float, default=3)
    ap.add_argument("--points", type=int, default=141)
    args = ap.parse_args(argv)
    args.outdir.mkdir(parents=True, exist_ok=True)

    betas = np.logspace(args.log10_min, args.log10_max, args.points)
    for label, game, N in SETTINGS:
        d = delta(game, N)
        for theta in args.thetas:
            regime = regime_of(theta, d)
            path = args.outdir / f"{label}_N{N}_theta{theta:g}.csv"
            with path.open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["beta", "E_reward", "E_punishment", "weak_limit",
                            "strong_limit_reward", "strong_limit_punishment"])
                weak = weak_selection_limit(N, theta)
                strong = [large_selection_limit(N, theta, s, regime) for s in ("reward", "punishment")]
                for beta in betas:
                    pop = PopulationConfig(N, beta)
                    w.writerow([f"{beta:.6g}"] + [f"{v:.10g}" for v in (
                        expected_cost(game, pop, "reward", theta),
                        expected_cost(game, pop, "punishment", theta), weak, *strong)])
            print(path)


if __name__ == "__main__":
    main()
