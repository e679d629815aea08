"""Phase transition in the incentive cost and the optimal-incentive algorithm.

Below the threshold ``beta_star = -F_star / delta`` the cost is
non-decreasing in ``theta``; above it the cost rises, falls between two
turning points ``theta_1 < theta_2`` and rises again.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .chain import IncentiveScheme, as_scheme, theta_min
from .cost import SYMBOLIC_CAP, CriticalFunctions, critical_functions, derive_psi, expected_cost
from .games import GameSpec, PopulationConfig, delta
from .rational import positive_roots

#: Largest N for which exactly two turning points are guaranteed.
N0 = 100
_MAX_DOUBLINGS = 200
_GRID = 4000


class PhaseAnalysisError(RuntimeError):
    pass


class Branch(str, enum.Enum):
    BELOW_THRESHOLD = "BelowThreshold"
    ABOVE_THRESHOLD_THETA0 = "AboveThreshold_Theta0"
    ABOVE_THRESHOLD_THETA2 = "AboveThreshold_Theta2"


@lru_cache(maxsize=None)
def _critical(N: int, scheme: IncentiveScheme) -> CriticalFunctions:
    return critical_functions(derive_psi(N, scheme, cap=max(N, SYMBOLIC_CAP)))


def decreasing_regions(N: int, scheme) -> list[tuple[float, float]]:
    """Intervals of ``u > 0`` on which ``P(u) > 0``."""
    cf = _critical(N, as_scheme(scheme))
    edges = [0.0] + positive_roots(cf.P) + [math.inf]
    regions = []
    for a, b in zip(edges[:-1], edges[1:]):
        probe = 2 * a if b == math.inf else (a + b) / 2
        probe = probe if probe > 0 else min(b / 2, 1.0)
        if cf.P_value(probe) > 0:
            regions.append((a, b))
    return regions


def _minimize_on(cf: CriticalFunctions, a: float, b: float) -> tuple[float, float]:
    lo = math.log(a) + 1e-9 if a > 0 else -50.0
    hi = math.log(b) - 1e-9 if b < math.inf else lo + 60.0
    t = np.linspace(lo, hi, _GRID)
    vals = cf.F_log(t)
    k = int(np.nanargmin(vals))
    if k in (0, _GRID - 1):
        raise PhaseAnalysisError(f"F has no interior minimum on ({a}, {b})")
    res = minimize_scalar(cf.F_log, bracket=(t[k - 1], t[k], t[k + 1]), method="brent",
                          options={"xtol": 1e-12})
    return float(res.fun), float(math.exp(res.x))


@lru_cache(maxsize=None)
def _f_star(N: int, scheme: IncentiveScheme) -> tuple[float, float]:
    cf = _critical(N, scheme)
    regions = decreasing_regions(N, scheme)
    if not regions:
        raise PhaseAnalysisError(f"P has no positive region for N={N}, {scheme.value}")
    return min((_minimize_on(cf, a, b) for a, b in regions), key=lambda m: m[0])


def f_star(N: int, scheme) -> tuple[float, float]:
    """``(F_star, u_star)``: the minimum of ``F`` where ``psi`` is decreasing."""
    if N < 3:
        raise ValueError(f"phase analysis needs N >= 3, got {N}")
    return _f_star(int(N), as_scheme(scheme))


def beta_star(game: GameSpec, N: int, scheme) -> float:
    F, _ = f_star(N, scheme)
    return -F / delta(game, N)


@dataclass(frozen=True)
class PhaseAnalysis:
    scheme: IncentiveScheme
    N: int
    F_star: float
    u_star: float
    beta_star: float
    P_roots: tuple[float, ...]
    heuristic: bool


def analyze(game: GameSpec, N: int, scheme) -> PhaseAnalysis:
    scheme = as_scheme(scheme)
    F, us = f_star(N, scheme)
    return PhaseAnalysis(scheme, N, F, us, -F / delta(game, N),
                         tuple(positive_roots(_critical(N, scheme).P)), N > N0)


def _region_of(N: int, scheme, u_star: float) -> tuple[float, float]:
    for a, b in decreasing_regions(N, scheme):
        if a < u_star < b:
            return a, b
    raise PhaseAnalysisError("u_star outside every decreasing region")


def find_u2(N: int, scheme, beta: float, delta_value: float) -> float:
    """Largest root of ``F(u) + beta*delta = 0``."""
    scheme = as_scheme(scheme)
    cf = _critical(N, scheme)
    F, us = f_star(N, scheme)
    target = -beta * delta_value
    if target < F:
        raise ValueError(f"beta={beta} is below the threshold; F(u) = {target} has no root")
    if math.isclose(target, F, rel_tol=1e-12):
        return us
    g = lambda t: cf.F_log(t) - target  # noqa: E731
    lo = math.log(us)
    for k in range(_MAX_DOUBLINGS):
        hi = math.log(us + 2.0**k)
        if g(hi) > 0:
            return math.exp(brentq(g, lo, hi, xtol=1e-14, rtol=1e-13))
    raise PhaseAnalysisError("could not bracket the largest root of F + beta*delta")


def find_u1(N: int, scheme, beta: float, delta_value: float) -> float:
    """Smaller root of ``F(u) + beta*delta = 0`` (between the edge of the
    decreasing region and ``u_star``)."""
    scheme = as_scheme(scheme)
    cf = _critical(N, scheme)
    F, us = f_star(N, scheme)
    target = -beta * delta_value
    if target < F:
        raise ValueError(f"beta={beta} is below the threshold; F(u) = {target} has no root")
    if math.isclose(target, F, rel_tol=1e-12):
        return us
    g = lambda t: cf.F_log(t) - target  # noqa: E731
    a, _ = _region_of(N, scheme, us)
    hi = math.log(us)
    for k in range(1, _MAX_DOUBLINGS):
        lo = math.log(a + (us - a) * 2.0**-k) if a > 0 else hi - k
        if g(lo) > 0:
            return math.exp(brentq(g, lo, hi, xtol=1e-14, rtol=1e-13))
    raise PhaseAnalysisError("could not bracket the smaller root of F + beta*delta")


@dataclass(frozen=True)
class OptimizationResult:
    theta_star: float
    cost_star: float
    branch: Branch
    theta0: float
    beta_star: float
    u2: float | None = None
    theta2: float | None = None
    cost_theta0: float | None = None
    cost_theta2: float | None = None
    heuristic: bool = False
    warnings: tuple[str, ...] = field(default=())


def optimize(game: GameSpec, pop: PopulationConfig, scheme, omega: float) -> OptimizationResult:
    """Cheapest incentive that still guarantees cooperation frequency ``omega``."""
    if not 0 < omega < 1:
        raise ValueError(f"omega must lie in (0, 1), got {omega}")
    if pop.beta <= 0:
        raise ValueError("optimize needs beta > 0")
    scheme = as_scheme(scheme)
    notes = []
    if omega < 0.5:
        notes.append("omega < 0.5: theta0 decreases with beta")
    heuristic = pop.N > N0
    if heuristic:
        notes.append(f"N={pop.N} > {N0}: two turning points are conjectured, not guaranteed")
        warnings.warn(notes[-1], stacklevel=2)

    d = delta(game, pop.N)
    theta0 = theta_min(game, pop, omega)
    F, _ = f_star(pop.N, scheme)
    bstar = -F / d
    cost = lambda th: expected_cost(game, pop, scheme, th)  # noqa: E731
    e0 = cost(theta0)
    common = dict(theta0=theta0, beta_star=bstar, cost_theta0=e0, heuristic=heuristic,
                  warnings=tuple(notes))
    if pop.beta <= bstar:
        return OptimizationResult(theta0, e0, Branch.BELOW_THRESHOLD, **common)

    u2 = find_u2(pop.N, scheme, pop.beta, d)
    theta2 = math.log(u2) / pop.beta - d
    if theta2 <= theta0:
        return OptimizationResult(theta0, e0, Branch.ABOVE_THRESHOLD_THETA0, u2=u2, theta2=theta2, **common)
    e2 = cost(theta2)
    if e0 <= e2:
        return OptimizationResult(theta0, e0, Branch.ABOVE_THRESHOLD_THETA0, u2=u2, theta2=theta2,
                                  cost_theta2=e2, **common)
    return OptimizationResult(theta2, e2, Branch.ABOVE_THRESHOLD_THETA2, u2=u2, theta2=theta2,
                              cost_theta2=e2, **common)


@dataclass(frozen=True)
class MonotonicityProfile:
    monotone: bool
    sign_changes: int
    theta1: float | None = None
    theta2: float | None = None


def derivative_sign_changes(game: GameSpec, pop: PopulationConfig, scheme,
                            points: int = 20001, log_u_max: float = 60.0) -> int:
    """Count sign changes of ``E'`` over ``theta > 0`` by sampling.

    The grid is geometric in ``u`` from ``theta = 0`` up to ``u = exp(log_u_max)``,
    beyond which ``F`` only grows.
    """
    from .cost import cost_profile

    prof = cost_profile(game, pop, scheme, cap=max(pop.N, SYMBOLIC_CAP))
    d = delta(game, pop.N)
    t = np.linspace(pop.beta * d, max(log_u_max, pop.beta * d + 1.0), points)[1:]
    theta = t / pop.beta - d
    s = np.sign(prof.derivative(theta))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def monotonicity_profile(game: GameSpec, pop: PopulationConfig, scheme) -> MonotonicityProfile:
    """Classify ``theta -> E(theta)`` as monotone or with two turning points,
    cross-checked by sampling the sign of ``E'``."""
    scheme = as_scheme(scheme)
    d = delta(game, pop.N)
    F, _ = f_star(pop.N, scheme)
    changes = derivative_sign_changes(game, pop, scheme)
    if pop.beta <= -F / d:
        if changes != 0:
            raise PhaseAnalysisError(f"expected a monotone cost, sampled {changes} sign changes of E'")
        return MonotonicityProfile(True, 0)
    u1 = find_u1(pop.N, scheme, pop.beta, d)
    u2 = find_u2(pop.N, scheme, pop.beta, d)
    if changes != 2:
        raise PhaseAnalysisError(f"expected two turning points, sampled {changes} sign changes of E'")
    return MonotonicityProfile(False, 2, math.log(u1) / pop.beta - d, math.log(u2) / pop.beta - d)
