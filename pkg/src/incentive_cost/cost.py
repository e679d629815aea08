"""Expected total incentive cost ``E(theta)`` for reward and punishment.

Two independent routes compute the same quantity:

* the matrix route solves ``(I - U) y = w`` numerically, where ``w_i`` is
  the number of individuals paid in state ``S_i``;
* the exact route reduces the cost to ``E(theta) = theta * psi(u)`` with
  ``u = exp(beta (theta + delta))`` and ``psi`` an exact rational function.

``psi`` depends on the population size and the scheme only, never on the
game or on ``beta``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np
import sympy as sp

from .chain import (
    IncentiveScheme,
    as_scheme,
    build_transition_matrix,
    fundamental_matrix,
    incentive_weights,
    selection_gap,
    solve_generator,
    transition_matrix_from_gap,
)
from .games import GameSpec, PopulationConfig, delta
from .rational import RationalFn, poly, primitive, strip_u_powers, u

#: Largest population for which ``psi`` is derived symbolically by default.
SYMBOLIC_CAP = 200


class SymbolicSizeError(ValueError):
    """Population too large for the exact route."""


# ---------------------------------------------------------------------------
# matrix route
# ---------------------------------------------------------------------------

def _psi_and_slope_from_gap(N: int, scheme, x: float, with_slope: bool = False):
    """``psi`` at ``log(u) = x`` and, optionally, ``d psi / d log(u)``."""
    U = transition_matrix_from_gap(N, x)
    y = solve_generator(U, incentive_weights(N, scheme))
    psi = float(0.5 * (y[0] + y[-1]))
    if not with_slope:
        return psi
    # d(I-U)^{-1} w = (I-U)^{-1} (dU) y ; only the off-diagonals move with x
    s = U.up * U.down / np.where(U.rate > 0, U.rate, 1.0)  # rate * sigma(x) * sigma(-x)
    dUy = np.zeros_like(y)
    dUy[:-1] += s[:-1] * y[1:]
    dUy[1:] -= s[1:] * y[:-1]
    dy = solve_generator(U, dUy)
    return psi, float(0.5 * (dy[0] + dy[-1]))


def psi_numeric(N: int, scheme, log_u) -> float | np.ndarray:
    """``psi(u)`` by the matrix route, for any ``N >= 2``."""
    t = np.asarray(log_u, dtype=float)
    out = np.array([_psi_and_slope_from_gap(N, scheme, float(v)) for v in t.ravel()]).reshape(t.shape)
    return out if out.ndim else float(out)


def psi_log_slope_numeric(N: int, scheme, log_u) -> float:
    """``u * psi'(u)`` by the matrix route (analytic derivative of the solve)."""
    return _psi_and_slope_from_gap(N, scheme, float(log_u), with_slope=True)[1]


def expected_cost_from_fundamental(game: GameSpec, pop: PopulationConfig, scheme, theta: float) -> float:
    """Expected cost written out from the full fundamental matrix; O(N^2)."""
    nmat = fundamental_matrix(build_transition_matrix(game, pop, theta)).matrix
    visits = nmat[0] + nmat[-1]
    return theta / 2 * float(visits @ incentive_weights(pop.N, scheme))


def expected_cost(game: GameSpec, pop: PopulationConfig, scheme, theta: float) -> float:
    """Expected total cost of the incentive scheme paying ``theta`` per head."""
    x = selection_gap(game, pop, theta)
    return theta * _psi_and_slope_from_gap(pop.N, scheme, x)


# ---------------------------------------------------------------------------
# exact route
# ---------------------------------------------------------------------------

def _coeff_poly(coeffs: list[Fraction]) -> sp.Poly:
    """Poly from ascending-order Fraction coefficients."""
    return sp.Poly([sp.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], u, domain=sp.QQ)


@lru_cache(maxsize=None)
def _derive_psi(N: int, scheme: IncentiveScheme) -> RationalFn:
    # Scaling row i of (I - U) y = w by (1+u)/rate_i gives
    #     (1+u) y_i - u y_{i+1} - y_{i-1} = (1+u) c_i,   c_i = w_i / rate_i,
    # so the first differences D_i = y_i - y_{i-1} obey D_{i+1} = (D_i - (1+u) c_i)/u
    # with sum_i D_i = 0. Clearing powers of u:
    #     y_1 = R / S,  y_{N-1} = (S G - R) / (u^{N-1} S)
    # S = sum_{j<N} u^j,  G = (1+u) sum_k c_k u^{k-1},
    # R = (1+u) sum_e u^e sum_{k<=e+1} c_k  (e = 0..N-2).
    w = incentive_weights(N, scheme)
    c = [Fraction(int(w[k - 1]) * N * N, k * (N - k)) for k in range(1, N)]
    prefix, acc = [], Fraction(0)
    for ck in c:
        acc += ck
        prefix.append(acc)
    one_plus_u = poly(1 + u)
    R = one_plus_u * _coeff_poly(prefix)
    G = one_plus_u * _coeff_poly(c)
    S = _coeff_poly([Fraction(1)] * N)
    uN1 = poly(u ** (N - 1))
    num = R * (uN1 - poly(1)) + S * G
    den = 2 * uN1 * S
    return RationalFn(num, den)


def derive_psi(N: int, scheme, cap: int = SYMBOLIC_CAP) -> RationalFn:
    """Exact ``psi_N`` with ``E(theta) = theta * psi_N(exp(beta (theta + delta)))``."""
    if N < 3:
        raise ValueError(f"derive_psi needs N >= 3, got {N}")
    if N > cap:
        raise SymbolicSizeError(f"N={N} is above the symbolic cap {cap}; use the matrix route")
    return _derive_psi(int(N), as_scheme(scheme))


@dataclass(frozen=True)
class CriticalFunctions:
    """Stationarity data derived from ``psi``.

    ``E'(theta) = (-u psi'(u)) * (F(u) + beta*delta)``, so on the region
    where ``P(u) > 0`` (``psi`` decreasing) the sign of ``E'`` is the sign
    of ``F(u) + beta*delta``.
    """

    ratio: RationalFn          # -psi / (u psi'), so that F = ratio - log(u)
    P: sp.Poly                 # primitive, positive leading coefficient

    def F(self, value):
        return self.F_log(np.log(np.asarray(value, dtype=float)))

    def F_log(self, log_u):
        return self.ratio.eval_log(log_u) - np.asarray(log_u, dtype=float)

    def P_value(self, value) -> float:
        return float(self.P.eval(sp.Rational(value)))


def critical_functions(psi: RationalFn) -> CriticalFunctions:
    a, b = psi.numerator, psi.denominator
    q = a * b.diff(u) - a.diff(u) * b   # -psi' * b^2
    ratio = RationalFn(a * b, poly(u) * q)
    return CriticalFunctions(ratio=ratio, P=primitive(strip_u_powers(q)))


@dataclass(frozen=True, eq=False)
class CostProfile:
    """Cost of one (game, population, scheme) with its exact ``psi``."""

    game: GameSpec
    pop: PopulationConfig
    scheme: IncentiveScheme
    psi: RationalFn
    psi_prime: RationalFn

    @property
    def delta(self) -> float:
        return delta(self.game, self.pop.N)

    def log_u(self, theta):
        return self.pop.beta * (np.asarray(theta, dtype=float) + self.delta)

    def cost(self, theta):
        return np.asarray(theta, dtype=float) * self.psi.eval_log(self.log_u(theta))

    def derivative(self, theta):
        """``psi(u) + beta * theta * u * psi'(u)``."""
        theta = np.asarray(theta, dtype=float)
        t = self.log_u(theta)
        u_dpsi = self._u_psi_prime.eval_log(t)
        return self.psi.eval_log(t) + self.pop.beta * theta * u_dpsi

    def __post_init__(self):
        object.__setattr__(self, "_u_psi_prime", self.psi_prime * poly(u))


def cost_profile(game: GameSpec, pop: PopulationConfig, scheme, cap: int = SYMBOLIC_CAP) -> CostProfile:
    pop.check_game(game)
    psi = derive_psi(pop.N, scheme, cap=cap)
    return CostProfile(game, pop, as_scheme(scheme), psi, psi.derivative())


def cost_derivative(game: GameSpec, pop: PopulationConfig, scheme, theta: float,
                    method: str = "auto", cap: int = SYMBOLIC_CAP) -> float:
    """``dE/dtheta``.

    ``method="exact"`` differentiates ``theta * psi(u)`` exactly;
    ``method="matrix"`` differentiates the tridiagonal solve. ``"auto"``
    picks the exact route when ``N`` is within the symbolic cap.
    """
    if method == "auto":
        method = "exact" if 3 <= pop.N <= cap else "matrix"
    if method == "exact":
        return float(cost_profile(game, pop, scheme, cap=cap).derivative(theta))
    if method == "matrix":
        x = selection_gap(game, pop, theta)
        psi, slope = _psi_and_slope_from_gap(pop.N, scheme, x, with_slope=True)
        return psi + pop.beta * theta * slope
    raise ValueError(f"unknown method {method!r}")


def numeric_derivative(f: Callable[[float], float], x: float, h: float = 1e-6) -> float:
    return (f(x + h) - f(x - h)) / (2 * h)
