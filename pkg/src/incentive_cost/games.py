"""Cooperation dilemmas: the Donation Game and the Public Goods Game.

Both games have a payoff gap ``Pi_C(i) - Pi_D(i)`` that does not depend on
the number ``i`` of cooperators; that constant is :func:`delta`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class DonationGame:
    """Pairwise donation game: a cooperator pays ``c`` to give ``b``."""

    b: float
    c: float

    def __post_init__(self):
        if not (self.b > self.c > 0):
            raise ValueError(f"DonationGame requires b > c > 0, got b={self.b}, c={self.c}")


@dataclass(frozen=True)
class PublicGoodsGame:
    """n-player public goods game with multiplier ``r`` and contribution ``c``."""

    r: float
    n: int
    c: float

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError(f"PublicGoodsGame requires c > 0, got c={self.c}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"PublicGoodsGame requires integer n >= 2, got n={self.n}")
        if not (1 < self.r < self.n):
            raise ValueError(f"PublicGoodsGame requires 1 < r < n, got r={self.r}, n={self.n}")


GameSpec = Union[DonationGame, PublicGoodsGame]


@dataclass(frozen=True)
class PopulationConfig:
    """Population size ``N`` and selection intensity ``beta``.

    ``N >= 2`` is accepted so the single-transient-state chain can be built;
    the cost analysis itself needs ``N >= 3``.
    """

    N: int
    beta: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"population size must be an integer >= 2, got N={self.N}")
        if not self.beta >= 0:
            raise ValueError(f"selection intensity must be >= 0, got beta={self.beta}")

    def check_game(self, game: GameSpec) -> None:
        if isinstance(game, PublicGoodsGame) and game.n > self.N:
            raise ValueError(f"group size n={game.n} exceeds population size N={self.N}")


def _check_n(game: GameSpec, N: int) -> None:
    if N < 2:
        raise ValueError(f"population size must be >= 2, got N={N}")
    if isinstance(game, PublicGoodsGame) and game.n > N:
        raise ValueError(f"group size n={game.n} exceeds population size N={N}")


def payoff_C(game: GameSpec, N: int, i: int) -> float:
    """Average payoff of a cooperator when ``i`` of ``N`` players cooperate."""
    _check_n(game, N)
    if not 1 <= i <= N:
        raise ValueError(f"payoff_C needs 1 <= i <= N, got i={i}, N={N}")
    if isinstance(game, DonationGame):
        return ((i - 1) * (game.b - game.c) + (N - i) * (-game.c)) / (N - 1)
    r, n, c = game.r, game.n, game.c
    return r * c / n * (1 + (i - 1) * (n - 1) / (N - 1)) - c


def payoff_D(game: GameSpec, N: int, i: int) -> float:
    """Average payoff of a defector when ``i`` of ``N`` players cooperate."""
    _check_n(game, N)
    if not 0 <= i <= N - 1:
        raise ValueError(f"payoff_D needs 0 <= i <= N-1, got i={i}, N={N}")
    if isinstance(game, DonationGame):
        return i * game.b / (N - 1)
    r, n, c = game.r, game.n, game.c
    return r * c * (n - 1) / (n * (N - 1)) * i


def delta(game: GameSpec, N: int) -> float:
    """Constant payoff gap ``Pi_C(i) - Pi_D(i)``; negative for both games."""
    _check_n(game, N)
    if isinstance(game, DonationGame):
        return -(game.c + game.b / (N - 1))
    r, n, c = game.r, game.n, game.c
    return -c * (1 - r * (N - n) / (n * (N - 1)))
