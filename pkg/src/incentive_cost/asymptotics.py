"""Closed-form limits and bounds of the expected incentive cost."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .chain import IncentiveScheme, as_scheme
from .games import DonationGame, GameSpec

EULER_GAMMA = 0.5772156649


class Regime(str, enum.Enum):
    """Where ``theta`` sits relative to the neutral incentive ``-delta``."""

    BELOW = "theta<-delta"
    NEUTRAL = "theta=-delta"
    ABOVE = "theta>-delta"


class LimitKind(str, enum.Enum):
    WEAK_SELECTION = "WeakSelection"
    LARGE_SELECTION = "LargeSelection"
    INFINITE_POPULATION = "InfinitePopulation"
    BOUNDS = "Bounds"


@dataclass(frozen=True)
class LimitReport:
    kind: LimitKind
    theoretical: float
    observed: float

    @property
    def relative_error(self) -> float:
        return abs(self.observed - self.theoretical) / abs(self.theoretical)


def harmonic(N: int) -> float:
    """``sum_{j=1}^{N-1} 1/j`` (the standard ``H_{N-1}``)."""
    if N < 2:
        raise ValueError(f"harmonic needs N >= 2, got {N}")
    return math.fsum(1.0 / j for j in range(1, N))


def weak_selection_limit(N: int, theta: float) -> float:
    return N**2 * theta * harmonic(N)


def regime_of(theta: float, delta_value: float) -> Regime:
    gap = theta + delta_value
    return Regime.BELOW if gap < 0 else Regime.ABOVE if gap > 0 else Regime.NEUTRAL


def large_selection_limit(N: int, theta: float, scheme, regime, delta_value: float | None = None) -> float:
    """Limit of the cost as ``beta -> infinity``.

    If ``delta_value`` is given, ``regime`` must agree with it.
    """
    scheme, regime = as_scheme(scheme), Regime(regime)
    if delta_value is not None and regime_of(theta, delta_value) is not regime:
        raise ValueError(f"regime {regime.value} inconsistent with theta={theta}, delta={delta_value}")
    H = harmonic(N)
    low = N**2 * theta / 2 * (H + 1 / (N - 1))
    high = N**2 * theta / 2 * (1 + H)
    if regime is Regime.NEUTRAL:
        return N**2 * theta * H
    favours_cooperators = regime is Regime.ABOVE
    if scheme is IncentiveScheme.REWARD:
        return high if favours_cooperators else low
    return low if favours_cooperators else high


def infinite_population_ratio(game: GameSpec, beta: float, theta: float) -> float:
    """Limit of ``E / ((N^2 theta / 2)(ln N + gamma))`` as ``N -> infinity``.

    Notes
    -----
    For the public goods game the extra factor ``exp(beta c r / n)`` is kept
    as stated, but finite-N costs computed here drift towards
    ``1 + exp(-beta |theta - c (1 - r/n)|)`` instead, the donation-game form
    with the large-population gap.
    """
    if beta <= 0:
        raise ValueError("infinite_population_ratio needs beta > 0")
    base = math.exp(-beta * abs(theta - game.c))
    if isinstance(game, DonationGame):
        return 1 + base
    return 1 + base * math.exp(beta * game.c * game.r / game.n)


def infinite_population_normalizer(N: int, theta: float) -> float:
    return N**2 * theta / 2 * (math.log(N) + EULER_GAMMA)


def cost_bounds(N: int, theta: float) -> tuple[float, float]:
    """Lower and upper bounds on the cost for ``theta > 0``."""
    if N < 3:
        raise ValueError(f"cost_bounds needs N >= 3, got {N}")
    if theta <= 0:
        raise ValueError(f"cost_bounds needs theta > 0, got {theta}")
    H = harmonic(N)
    return N**2 * theta / 2 * (H + 1 / (N - 1)), N * (N - 1) * theta * (H + 1)
