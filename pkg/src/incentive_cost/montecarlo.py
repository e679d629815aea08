"""Direct simulation of the imitation chain, used as an oracle for the
matrix computations.

Runs are split into fixed-size chunks. Chunk ``k`` draws from its own
``SeedSequence(seed, spawn_key=(k,))`` stream, so the estimate depends only
on ``(seed, runs)`` and not on how many workers execute the chunks.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chain import IncentiveScheme, as_scheme, build_transition_matrix, incentive_weights
from .games import GameSpec, PopulationConfig

CHUNK_RUNS = 8192
MAX_STEPS = 10**9


@dataclass(frozen=True)
class SimConfig:
    game: GameSpec
    pop: PopulationConfig
    scheme: IncentiveScheme
    theta: float
    runs: int
    seed: int = 0

    def __post_init__(self):
        if int(self.runs) != self.runs or self.runs < 1:
            raise ValueError(f"runs must be a positive integer, got {self.runs}")
        if not np.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "scheme", as_scheme(self.scheme))
        self.pop.check_game(self.game)


@dataclass(frozen=True)
class SimEstimate:
    mean_visits: np.ndarray      # per transient state S_1..S_{N-1}
    se_visits: np.ndarray
    mean_total_cost: float
    se_total_cost: float
    runs: int
    truncated_runs: int = 0


def _simulate_chunk(up: np.ndarray, down: np.ndarray, N: int, runs: int,
                    rng: np.random.Generator, max_steps: int) -> tuple[np.ndarray, int]:
    """Visit counts per run (shape ``runs x (N-1)``) and the number of runs
    cut off by ``max_steps``."""
    visits = np.zeros((runs, N - 1), dtype=np.int64)
    state = np.where(rng.random(runs) < 0.5, 1, N - 1)
    active = np.arange(runs)
    steps = 0
    while active.size and steps < max_steps:
        s = state[active]
        # every step in S_i counts, self-loops included
        visits[active, s - 1] += 1
        r = rng.random(active.size)
        p_up, p_down = up[s - 1], down[s - 1]
        s = s + (r < p_up) - ((r >= p_up) & (r < p_up + p_down))
        state[active] = s
        active = active[(s > 0) & (s < N)]
        steps += 1
    return visits, int(active.size)


def simulate_visits(cfg: SimConfig, workers: int = 1, max_steps: int = MAX_STEPS) -> SimEstimate:
    """Estimate expected visits per state and the expected total cost."""
    N = cfg.pop.N
    U = build_transition_matrix(cfg.game, cfg.pop, cfg.theta)
    sizes = [CHUNK_RUNS] * (cfg.runs // CHUNK_RUNS)
    if cfg.runs % CHUNK_RUNS:
        sizes.append(cfg.runs % CHUNK_RUNS)

    def job(k):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(cfg.seed, spawn_key=(k,))))
        return _simulate_chunk(U.up, U.down, N, sizes[k], rng, max_steps)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, range(len(sizes))))
    else:
        results = [job(k) for k in range(len(sizes))]

    visits = np.concatenate([v for v, _ in results]).astype(float)
    truncated = sum(t for _, t in results)
    cost = cfg.theta * (visits @ incentive_weights(N, cfg.scheme))
    n = cfg.runs
    # sample std with ddof=1; a single run has no spread estimate
    ddof = 1 if n > 1 else 0
    return SimEstimate(
        mean_visits=visits.mean(axis=0),
        se_visits=visits.std(axis=0, ddof=ddof) / np.sqrt(n),
        mean_total_cost=float(cost.mean()),
        se_total_cost=float(cost.std(ddof=ddof) / np.sqrt(n)),
        runs=n,
        truncated_runs=truncated,
    )
