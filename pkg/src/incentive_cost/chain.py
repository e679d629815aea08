"""Birth-death chain of the imitation process under an institutional incentive.

State ``S_i`` holds ``i`` cooperators. Under the Fermi rule the number of
cooperators moves up or down by one per step with probabilities

    u_{i,i+1} = i(N-i)/N^2 * sigma(x),   u_{i,i-1} = i(N-i)/N^2 * sigma(-x)

where ``sigma`` is the logistic function and ``x = beta*(delta + theta)``:
the incentive shifts the payoff gap by ``theta`` for reward and punishment
alike. ``S_0`` and ``S_N`` are absorbing.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logsumexp

from .games import GameSpec, PopulationConfig, delta, payoff_C, payoff_D


class IncentiveScheme(str, enum.Enum):
    REWARD = "reward"
    PUNISHMENT = "punishment"


class Direction(str, enum.Enum):
    """Which single mutant is trying to take over."""

    D_TO_C = "D->C"  # a lone cooperator among defectors
    C_TO_D = "C->D"  # a lone defector among cooperators


def as_scheme(scheme) -> IncentiveScheme:
    return scheme if isinstance(scheme, IncentiveScheme) else IncentiveScheme(str(scheme).lower())


def incentive_weights(N: int, scheme) -> np.ndarray:
    """Individuals paid per step in states ``S_1..S_{N-1}`` (``i`` or ``N-i``)."""
    i = np.arange(1, N)
    return (i if as_scheme(scheme) is IncentiveScheme.REWARD else N - i).astype(float)


def selection_gap(game: GameSpec, pop: PopulationConfig, theta: float) -> float:
    """``x = beta * (delta + theta)``, the only way the chain sees game and incentive."""
    pop.check_game(game)
    if not np.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta}")
    return float(pop.beta * (delta(game, pop.N) + theta))


@dataclass(frozen=True)
class TransitionMatrix:
    """Tridiagonal transition matrix on the transient states ``S_1..S_{N-1}``.

    ``up[k]`` and ``down[k]`` are ``u_{i,i+1}`` and ``u_{i,i-1}`` for
    ``i = k + 1``. ``rate[k] = i(N-i)/N^2`` equals ``up[k] + down[k]``
    and is kept separately so ``I - U`` has an exact diagonal.
    """

    N: int
    up: np.ndarray
    down: np.ndarray
    rate: np.ndarray

    @property
    def stay(self) -> np.ndarray:
        return 1.0 - self.rate

    def dense(self) -> np.ndarray:
        m = self.N - 1
        U = np.diag(self.stay)
        U[np.arange(m - 1), np.arange(1, m)] = self.up[:-1]
        U[np.arange(1, m), np.arange(m - 1)] = self.down[1:]
        return U


def transition_matrix_from_gap(N: int, x: float) -> TransitionMatrix:
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    i = np.arange(1, N, dtype=float)
    rate = i * (N - i) / N**2
    # expit saturates to exactly 0/1 instead of overflowing at large |x|
    return TransitionMatrix(N, rate * expit(x), rate * expit(-x), rate)


def build_transition_matrix(game: GameSpec, pop: PopulationConfig, theta: float) -> TransitionMatrix:
    return transition_matrix_from_gap(pop.N, selection_gap(game, pop, theta))


def solve_generator(U: TransitionMatrix, rhs: np.ndarray) -> np.ndarray:
    """Solve ``(I - U) y = rhs`` by Thomas elimination, O(N) per column.

    The pivots are formed without subtraction: with ``e_1 = down_1`` and
    ``e_i = down_i e_{i-1} / d_{i-1}`` the i-th pivot is ``d_i = up_i + e_i``.
    For a nonnegative ``rhs`` every step is a sum of nonnegative terms, so
    each entry of ``y`` keeps full relative accuracy however small it is.
    """
    up, down = U.up, U.down
    b = np.array(rhs, dtype=float, copy=True)
    m = U.N - 1
    d = np.empty(m)
    e = down[0]
    for i in range(m):
        if i:
            e = down[i] * e / d[i - 1]
            b[i] += down[i] * b[i - 1] / d[i - 1]
        d[i] = up[i] + e
    if not np.all(d > 0):
        raise ArithmeticError("singular generator I - U")
    b[m - 1] /= d[m - 1]
    for i in range(m - 2, -1, -1):
        b[i] = (b[i] + up[i] * b[i + 1]) / d[i]
    return b


def banded_generator(U: TransitionMatrix) -> np.ndarray:
    """``I - U`` in the (1, 1) banded layout of ``scipy.linalg.solve_banded``."""
    ab = np.zeros((3, U.N - 1))
    ab[0, 1:] = -U.up[:-1]
    ab[1] = U.rate
    ab[2, :-1] = -U.down[1:]
    return ab


@dataclass(frozen=True)
class FundamentalMatrix:
    """``(I - U)^{-1}``; entry ``[i-1, j-1]`` is the expected time spent in
    ``S_j`` when starting from ``S_i``."""

    N: int
    matrix: np.ndarray


def fundamental_matrix(U: TransitionMatrix) -> FundamentalMatrix:
    return FundamentalMatrix(U.N, solve_generator(U, np.eye(U.N - 1)))


def expected_visits(nmat: FundamentalMatrix, i: int) -> float:
    """Mean number of steps in ``S_i`` when the mutant starts at ``S_1`` or
    ``S_{N-1}`` with equal probability."""
    if not 1 <= i <= nmat.N - 1:
        raise IndexError(f"state index must be in 1..{nmat.N - 1}, got {i}")
    return 0.5 * (nmat.matrix[0, i - 1] + nmat.matrix[-1, i - 1])


def _log_fermi(z):
    """log of (1 + e^{-z})^{-1}, stable for any z."""
    return -np.logaddexp(0.0, -z)


def log_fixation_probability(game: GameSpec, pop: PopulationConfig, theta: float,
                             direction=Direction.D_TO_C) -> float:
    """Natural log of the probability that a single mutant takes over.

    Uses the product-sum formula with the ratios ``T^-(k)/T^+(k)`` built
    from the individual payoffs at each ``k``, accumulated in log domain.
    """
    direction = Direction(direction)
    pop.check_game(game)
    N, beta = pop.N, pop.beta
    k = np.arange(1, N)
    gap_c = np.array([payoff_C(game, N, j) - payoff_D(game, N, j) for j in k]) + theta
    if direction is Direction.D_TO_C:
        z = beta * gap_c           # k cooperators
    else:
        z = -beta * gap_c[::-1]    # k defectors, i.e. N-k cooperators
    # log T^-(k) - log T^+(k); the common factor k(N-k)/N^2 cancels
    log_ratio = _log_fermi(-z) - _log_fermi(z)
    log_terms = np.concatenate(([0.0], np.cumsum(log_ratio)))
    return float(-logsumexp(log_terms))


def fixation_probability(game: GameSpec, pop: PopulationConfig, theta: float,
                         direction=Direction.D_TO_C) -> float:
    """Probability that a single mutant takes over (``1/N`` at ``beta = 0``)."""
    return float(np.exp(log_fixation_probability(game, pop, theta, direction)))


def cooperation_frequency(game: GameSpec, pop: PopulationConfig, theta: float,
                          method: str = "closed") -> float:
    """Stationary frequency of cooperation in the small-mutation limit.

    ``method="closed"`` uses ``rho_DC / rho_CD = exp(beta (N-1) (delta + theta))``;
    ``method="fixation"`` divides the two fixation probabilities directly.
    """
    if method == "closed":
        return float(expit((pop.N - 1) * selection_gap(game, pop, theta)))
    if method == "fixation":
        log_dc = log_fixation_probability(game, pop, theta, Direction.D_TO_C)
        log_cd = log_fixation_probability(game, pop, theta, Direction.C_TO_D)
        return float(expit(log_dc - log_cd))
    raise ValueError(f"unknown method {method!r}")


def theta_min(game: GameSpec, pop: PopulationConfig, omega: float) -> float:
    """Smallest incentive whose cooperation frequency is at least ``omega``."""
    if not 0 < omega < 1:
        raise ValueError(f"omega must lie in (0, 1), got {omega}")
    if pop.beta <= 0:
        raise ValueError("theta_min needs beta > 0")
    pop.check_game(game)
    return float(np.log(omega / (1 - omega)) / ((pop.N - 1) * pop.beta) - delta(game, pop.N))
