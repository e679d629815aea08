"""Acceptance checks against reference values and the asymptotic limits.

Each ``check_*`` function returns a :class:`CheckResult`; :func:`run_all`
runs them in order. ``tests/test_acceptance.py`` and ``incentive-cost
validate`` both go through this module.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .asymptotics import (
    Regime,
    cost_bounds,
    harmonic,
    infinite_population_normalizer,
    infinite_population_ratio,
    large_selection_limit,
)
from .chain import Direction, log_fixation_probability
from .cost import expected_cost
from .games import DonationGame, PopulationConfig, PublicGoodsGame, delta
from .montecarlo import SimConfig, simulate_visits
from .phase import beta_star, derivative_sign_changes, f_star, optimize

SCHEMES = ("reward", "punishment")


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number:2d}. {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def _n3_closed_form(scheme: str, theta: float, x: float) -> float:
    e, e2 = math.exp(x), math.exp(2 * x)
    if scheme == "reward":
        return 9 * theta / 4 * (5 + (4 * e - 1) / (1 + e + e2))
    return 9 * theta / 4 * (4 + (5 * e + 1) / (1 + e + e2))


def check_n3_closed_forms() -> CheckResult:
    t0 = time.perf_counter()
    game = DonationGame(2, 1)
    d = delta(game, 3)
    worst = 0.0
    for beta in (0.1, 1.0, 10.0):
        pop = PopulationConfig(3, beta)
        for theta in np.round(np.arange(0.1, 5.0 + 1e-9, 0.1), 10):
            for scheme in SCHEMES:
                x = beta * (theta + d)
                worst = max(worst, _rel(expected_cost(game, pop, scheme, theta), _n3_closed_form(scheme, theta, x)))
    dt = time.perf_counter() - t0
    return CheckResult(1, "N=3 closed forms", worst <= 1e-10 and dt < 1.0,
                       f"max rel err {worst:.2e} (tol 1e-10)", dt)


def check_phase_constants() -> CheckResult:
    t0 = time.perf_counter()
    F, us = f_star(3, "reward")
    dt = time.perf_counter() - t0
    ok = abs(F - 10.9291) <= 1e-3 and abs(us - 4.29712) <= 1e-4 and dt < 1.0
    return CheckResult(2, "F* and u* for N=3 reward", ok, f"F*={F:.6f}, u*={us:.6f}", dt)


def check_thresholds() -> CheckResult:
    t0 = time.perf_counter()
    game = DonationGame(1.8, 1)
    b3 = beta_star(game, 3, "reward")
    F50, _ = f_star(50, "reward")
    b50 = beta_star(game, 50, "reward")
    dt = time.perf_counter() - t0
    ok = abs(b3 - 5.752) <= 1e-3 and abs(F50 - 3.15) <= 1e-2 and abs(b50 - 3.039) <= 2e-3 and dt < 10
    return CheckResult(3, "phase thresholds beta*", ok,
                       f"beta*(N=3)={b3:.5f}, F*(N=50)={F50:.5f}, beta*(N=50)={b50:.5f}", dt)


def check_algorithm() -> CheckResult:
    t0 = time.perf_counter()
    game, pop = DonationGame(1.8, 1), PopulationConfig(3, 10.0)
    r1 = optimize(game, pop, "reward", 0.25)
    r2 = optimize(game, pop, "reward", 0.7)
    r3 = optimize(game, pop, "reward", 0.999999)
    ok = (abs(r1.theta_star - 1.845) <= 1e-3 and abs(r1.cost_star - 23.602) <= 1e-2
          and abs(r2.theta_star - 2.16) <= 1e-2 and abs(r2.cost_star - 25.6124) <= 1e-3
          and abs(r2.cost_theta0 - 26.446) <= 1e-2
          and abs(r3.theta_star - 2.59078) <= 1e-4)
    detail = (f"w=0.25: theta*={r1.theta_star:.5f} E={r1.cost_star:.4f}; "
              f"w=0.7: theta*={r2.theta_star:.5f} E={r2.cost_star:.5f} E(theta0)={r2.cost_theta0:.4f}; "
              f"w=0.999999: theta*={r3.theta_star:.6f}")
    return CheckResult(4, "optimal incentive end to end", ok, detail, time.perf_counter() - t0)


def check_weak_selection() -> CheckResult:
    t0 = time.perf_counter()
    game = DonationGame(2, 1)
    worst = 0.0
    for N in (3, 10, 50):
        pop = PopulationConfig(N, 1e-6)
        for theta in (0.5, 1.0, 2.0, 4.0):
            ref = N**2 * theta * harmonic(N)
            for scheme in SCHEMES:
                worst = max(worst, _rel(expected_cost(game, pop, scheme, theta), ref))
    return CheckResult(5, "weak selection limit", worst <= 1e-4, f"max rel err {worst:.2e} (tol 1e-4)",
                       time.perf_counter() - t0)


def check_strong_selection() -> CheckResult:
    t0 = time.perf_counter()
    game = DonationGame(2, 1)
    worst = 0.0
    for N in (3, 10, 50):
        pop = PopulationConfig(N, 1e3)
        d = delta(game, N)
        for theta, regime in ((-d - 0.5, Regime.BELOW), (-d, Regime.NEUTRAL), (-d + 0.5, Regime.ABOVE)):
            for scheme in SCHEMES:
                ref = large_selection_limit(N, theta, scheme, regime, delta_value=d)
                worst = max(worst, _rel(expected_cost(game, pop, scheme, theta), ref))
    return CheckResult(6, "strong selection limit", worst <= 1e-3, f"max rel err {worst:.2e} (tol 1e-3)",
                       time.perf_counter() - t0)


def check_crossover() -> CheckResult:
    t0 = time.perf_counter()
    game = DonationGame(2, 1)
    bad = 0
    total = 0
    for N in (3, 5, 10, 50):
        d = delta(game, N)
        for beta in (0.1, 1.0, 10.0):
            pop = PopulationConfig(N, beta)
            for theta in np.round(np.arange(0.01, 5.0 + 1e-9, 0.01), 10):
                er = expected_cost(game, pop, "reward", theta)
                ep = expected_cost(game, pop, "punishment", theta)
                total += 1
                if np.sign(er - ep) != np.sign(theta + d):
                    bad += 1
            er, ep = (expected_cost(game, pop, s, -d) for s in SCHEMES)
            total += 1
            bad += abs(er - ep) > 1e-10 * abs(ep)
    return CheckResult(7, "reward/punishment crossover at -delta", bad == 0,
                       f"{bad} sign mismatches in {total} grid points", time.perf_counter() - t0)


def random_game(rng: np.random.Generator, N: int):
    if rng.random() < 0.5 or N < 3:
        c = rng.uniform(0.1, 2.0)
        return DonationGame(c * rng.uniform(1.05, 4.0), c)
    n = int(rng.integers(2, min(N, 10) + 1))
    return PublicGoodsGame(rng.uniform(1.05, n - 0.05) if n > 2 else 1.5, n, rng.uniform(0.1, 2.0))


def check_bounds(samples: int = 1000, seed: int = 8) -> CheckResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(samples):
        N = int(rng.integers(3, 101))
        game = random_game(rng, N)
        pop = PopulationConfig(N, 10 ** rng.uniform(-3, 3))
        theta = rng.uniform(1e-3, 10)
        lo, hi = cost_bounds(N, theta)
        for scheme in SCHEMES:
            e = expected_cost(game, pop, scheme, theta)
            bad += not (lo * (1 - 1e-12) <= e <= hi * (1 + 1e-12))
    return CheckResult(8, "finite-population bounds", bad == 0,
                       f"{bad} violations in {2 * samples} evaluations", time.perf_counter() - t0)


def check_fixation_ratio(samples: int = 1000, seed: int = 9) -> CheckResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        N = int(rng.integers(3, 31))
        game = random_game(rng, N)
        pop = PopulationConfig(N, 10 ** rng.uniform(-3, 1))
        theta = rng.uniform(-5, 5)
        log_ratio = (log_fixation_probability(game, pop, theta, Direction.D_TO_C)
                     - log_fixation_probability(game, pop, theta, Direction.C_TO_D))
        expected = pop.beta * (N - 1) * (delta(game, N) + theta)
        # |log a - log b| bounds the relative error of a/b to first order
        worst = max(worst, abs(math.expm1(log_ratio - expected)))
    return CheckResult(9, "fixation ratio identity", worst <= 1e-8, f"max rel err {worst:.2e} (tol 1e-8)",
                       time.perf_counter() - t0)


def montecarlo_configs(count: int = 20, seed: int = 10) -> list[tuple]:
    rng = np.random.default_rng(seed)
    configs = []
    for _ in range(count):
        N = int(rng.integers(3, 21))
        game = random_game(rng, N)
        pop = PopulationConfig(N, 10 ** rng.uniform(-2, 0.5))
        theta = float(-delta(game, N) + rng.uniform(-2, 2) / pop.beta / 2)
        theta = max(theta, 0.05)
        configs.append((game, pop, SCHEMES[int(rng.integers(2))], theta))
    return configs


def check_montecarlo(runs: int = 100_000, seed: int = 2024) -> CheckResult:
    from .chain import build_transition_matrix, expected_visits, fundamental_matrix

    t0 = time.perf_counter()
    failures = []
    comparisons = 0
    for k, (game, pop, scheme, theta) in enumerate(montecarlo_configs()):
        est = simulate_visits(SimConfig(game, pop, scheme, theta, runs, seed + k))
        nmat = fundamental_matrix(build_transition_matrix(game, pop, theta))
        visits = np.array([expected_visits(nmat, i) for i in range(1, pop.N)])
        z_visits = np.abs(est.mean_visits - visits) / est.se_visits
        z_cost = abs(est.mean_total_cost - expected_cost(game, pop, scheme, theta)) / est.se_total_cost
        comparisons += z_visits.size + 1
        if z_visits.max() > 3 or z_cost > 3:
            failures.append(f"config {k}: max z visits {z_visits.max():.2f}, z cost {z_cost:.2f}")
    dt = time.perf_counter() - t0
    detail = "all 20 configs within 3 SE" if not failures else "; ".join(failures)
    detail += f" [{comparisons} comparisons at 3 SE]"
    return CheckResult(10, "Monte Carlo oracle", not failures and dt < 120, detail, dt)


INFINITE_N_SETTINGS = (
    (DonationGame(2, 1), 1.0, 2.0),
    (DonationGame(2, 1), 1.0, 0.5),
    (DonationGame(1.8, 1), 0.5, 3.0),
)


def normalized_cost_trend(game, beta: float, theta: float, scheme: str,
                          sizes=(50, 100, 200, 400)) -> list[float]:
    return [expected_cost(game, PopulationConfig(N, beta), scheme, theta) / infinite_population_normalizer(N, theta)
            for N in sizes]


def check_infinite_population() -> CheckResult:
    t0 = time.perf_counter()
    bad = []
    for game, beta, theta in INFINITE_N_SETTINGS:
        target = infinite_population_ratio(game, beta, theta)
        for scheme in SCHEMES:
            gaps = np.abs(np.array(normalized_cost_trend(game, beta, theta, scheme)) - target)
            if not np.all(np.diff(gaps) < 0):
                bad.append(f"{game}, beta={beta}, theta={theta}, {scheme}: gaps {np.round(gaps, 4)}")
    detail = "distance to the limit shrinks monotonically in all settings" if not bad else "; ".join(bad)
    return CheckResult(11, "infinite-population trend", not bad, detail, time.perf_counter() - t0)


def check_sign_changes() -> CheckResult:
    t0 = time.perf_counter()
    game = DonationGame(1.8, 1)
    counts = {}
    for N in (3, 10, 50, 100):
        for scheme in SCHEMES:
            b = beta_star(game, N, scheme)
            counts[(N, scheme)] = (derivative_sign_changes(game, PopulationConfig(N, 2 * b), scheme),
                                   derivative_sign_changes(game, PopulationConfig(N, b / 2), scheme))
    ok = all(c == (2, 0) for c in counts.values())
    bad = {k: v for k, v in counts.items() if v != (2, 0)}
    detail = "two changes at 2 beta*, none at beta*/2 for all N" if ok else f"mismatches {bad}"
    return CheckResult(12, "sign changes of E'", ok, detail, time.perf_counter() - t0)


CHECKS: tuple[Callable[[], CheckResult], ...] = (
    check_n3_closed_forms,
    check_phase_constants,
    check_thresholds,
    check_algorithm,
    check_weak_selection,
    check_strong_selection,
    check_crossover,
    check_bounds,
    check_fixation_ratio,
    check_montecarlo,
    check_infinite_population,
    check_sign_changes,
)


def run_all(skip_montecarlo: bool = False) -> list[CheckResult]:
    results = []
    for check in CHECKS:
        if skip_montecarlo and check is check_montecarlo:
            continue
        results.append(check())
    return results

