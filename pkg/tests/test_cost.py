import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from incentive_cost.asymptotics import cost_bounds, harmonic
from incentive_cost.cost import (
    SymbolicSizeError,
    cost_derivative,
    cost_profile,
    critical_functions,
    derive_psi,
    expected_cost,
    expected_cost_from_fundamental,
    numeric_derivative,
    psi_log_slope_numeric,
    psi_numeric,
)
from incentive_cost.games import DonationGame, PopulationConfig, PublicGoodsGame, delta
from incentive_cost.rational import RationalFn, poly, u

from .conftest import games


def n3_closed_form(scheme, theta, x):
    e = math.exp(x)
    if scheme == "reward":
        return 9 * theta / 4 * (5 + (4 * e - 1) / (1 + e + e * e))
    return 9 * theta / 4 * (4 + (5 * e + 1) / (1 + e + e * e))


@pytest.mark.parametrize("scheme", ["reward", "punishment"])
@pytest.mark.parametrize("beta", [0.1, 1.0, 10.0])
def test_matrix_route_reproduces_n3_closed_form(dg2, scheme, beta):
    pop = PopulationConfig(3, beta)
    for theta in np.linspace(0.1, 5, 50):
        x = beta * (theta + delta(dg2, 3))
        assert expected_cost(dg2, pop, scheme, theta) == pytest.approx(n3_closed_form(scheme, theta, x), rel=1e-10)


def test_neutral_incentive_n3(dg2):
    theta = -delta(dg2, 3)
    for scheme in ("reward", "punishment"):
        assert expected_cost(dg2, PopulationConfig(3, 0.7), scheme, theta) == pytest.approx(13.5 * theta, rel=1e-14)


def test_cost_at_minimal_incentive(dg18):
    from incentive_cost.chain import theta_min

    theta0 = theta_min(dg18, PopulationConfig(3, 10), 0.25)
    assert theta0 == pytest.approx(1.845, abs=1e-3)
    assert expected_cost(dg18, PopulationConfig(3, 10), "reward", theta0) == pytest.approx(23.602, abs=1e-3)


def test_sparse_and_full_fundamental_agree(dg18):
    pop = PopulationConfig(17, 0.8)
    for theta in (0.3, 2.2, 6.0):
        for scheme in ("reward", "punishment"):
            assert expected_cost(dg18, pop, scheme, theta) == pytest.approx(
                expected_cost_from_fundamental(dg18, pop, scheme, theta), rel=1e-12)


def test_psi_n3_exact():
    # N=3 costs in closed form: (9/4)(5 + (4u-1)/(1+u+u^2)) and (9/4)(4 + (5u+1)/(1+u+u^2))
    reward = RationalFn.from_expr(sp.Rational(9, 4) * (5 + (4 * u - 1) / (1 + u + u**2)))
    punish = RationalFn.from_expr(sp.Rational(9, 4) * (4 + (5 * u + 1) / (1 + u + u**2)))
    assert derive_psi(3, "reward") == reward
    assert derive_psi(3, "punishment") == punish
    assert derive_psi(3, "reward") == RationalFn.from_expr(sp.Rational(9, 4) * (5 * u + 4) * (u + 1) / (u**2 + u + 1))


@pytest.mark.parametrize("N", [3, 4, 7, 12, 20])
def test_reward_punishment_mirror(N):
    r, p = derive_psi(N, "reward"), derive_psi(N, "punishment")
    assert sp.simplify(r.as_expr().subs(u, 1 / u) - p.as_expr()) == 0


def test_derive_psi_limits():
    with pytest.raises(ValueError):
        derive_psi(2, "reward")
    with pytest.raises(SymbolicSizeError):
        derive_psi(41, "reward", cap=40)


def test_critical_functions_n3():
    cf = critical_functions(derive_psi(3, "reward"))
    assert cf.P == poly(4 * u**2 - 2 * u - 5)
    assert cf.F(4.29712) == pytest.approx(10.9291, abs=1e-4)
    # rational part of F: (u+1)(5u+4)(u^2+u+1) / (u (4u^2 - 2u - 5))
    assert cf.ratio == RationalFn.from_expr((u + 1) * (5 * u + 4) * (u**2 + u + 1) / (u * (4 * u**2 - 2 * u - 5)))
    hat = critical_functions(derive_psi(3, "punishment"))
    assert hat.P == poly(5 * u**2 + 2 * u - 4)  # 2 * (5/2 u^2 + u - 2)


@pytest.mark.parametrize("N", [3, 6, 15])
@pytest.mark.parametrize("scheme", ["reward", "punishment"])
def test_P_sign_marks_decreasing_psi(N, scheme):
    psi = derive_psi(N, scheme)
    cf = critical_functions(psi)
    dpsi = psi.derivative()
    for val in np.geomspace(1e-3, 1e3, 61):
        p = cf.P_value(val)
        d = float(dpsi.exact(sp.Rational(val)))
        assert (p > 0) == (d < 0)


@settings(max_examples=60, deadline=None)
@given(game=games(max_n=3), N=st.integers(3, 20), beta=st.floats(1e-2, 50), theta=st.floats(0.01, 10))
def test_exact_route_equals_matrix_route(game, N, beta, theta):
    pop = PopulationConfig(N, beta)
    exact = cost_profile(game, pop, "reward").cost(theta)
    assert float(exact) == pytest.approx(expected_cost(game, pop, "reward", theta), rel=1e-9)
    exact = cost_profile(game, pop, "punishment").cost(theta)
    assert float(exact) == pytest.approx(expected_cost(game, pop, "punishment", theta), rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(N=st.integers(3, 20), x=st.floats(-30, 30))
def test_psi_numeric_equals_exact(N, x):
    for scheme in ("reward", "punishment"):
        assert psi_numeric(N, scheme, x) == pytest.approx(derive_psi(N, scheme).eval_log(x), rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(N=st.integers(3, 20), x=st.floats(-20, 20))
def test_matrix_mirror(N, x):
    assert psi_numeric(N, "reward", x) == pytest.approx(psi_numeric(N, "punishment", -x), rel=1e-10)


@pytest.mark.parametrize("N", [3, 5, 10, 50])
def test_reward_cheaper_below_neutral_incentive(dg2, N):
    d = delta(dg2, N)
    for beta in (0.1, 1.0, 10.0):
        pop = PopulationConfig(N, beta)
        for theta in np.linspace(0.05, 5, 100):
            if abs(theta + d) < 1e-9:
                continue
            diff = expected_cost(dg2, pop, "reward", theta) - expected_cost(dg2, pop, "punishment", theta)
            assert np.sign(diff) == np.sign(theta + d)


@settings(max_examples=300, deadline=None)
@given(game=games(), N=st.integers(10, 100), logbeta=st.floats(-3, 3), theta=st.floats(1e-3, 10))
def test_cost_bounds_hold(game, N, logbeta, theta):
    pop = PopulationConfig(N, 10**logbeta)
    lo, hi = cost_bounds(N, theta)
    for scheme in ("reward", "punishment"):
        e = expected_cost(game, pop, scheme, theta)
        assert lo * (1 - 1e-12) <= e <= hi * (1 + 1e-12)


def test_derivative_at_zero(dg18):
    pop = PopulationConfig(6, 1.5)
    psi = derive_psi(6, "reward")
    assert cost_derivative(dg18, pop, "reward", 0.0) == pytest.approx(psi(math.exp(pop.beta * delta(dg18, 6))), rel=1e-12)
    assert expected_cost(dg18, pop, "reward", 0.0) == 0.0


@pytest.mark.parametrize("N", [3, 10, 30])
def test_derivative_weak_selection(dg18, N):
    pop = PopulationConfig(N, 1e-8)
    for theta in (0.5, 3.0):
        for method in ("exact", "matrix"):
            assert cost_derivative(dg18, pop, "reward", theta, method=method) == pytest.approx(
                N**2 * harmonic(N), rel=1e-5)


def test_derivative_sign_matches_finite_differences():
    rng = np.random.default_rng(5)
    game = DonationGame(1.8, 1)
    for _ in range(20):
        N = int(rng.integers(3, 15))
        pop = PopulationConfig(N, float(10 ** rng.uniform(-1, 1.3)))
        theta = float(rng.uniform(0.1, 5))
        scheme = ("reward", "punishment")[int(rng.integers(2))]
        fd = numeric_derivative(lambda t: expected_cost(game, pop, scheme, t), theta, 1e-6)
        exact = cost_derivative(game, pop, scheme, theta, method="exact")
        cf_sign = np.sign(derive_psi(N, scheme).eval_log(pop.beta * (theta + delta(game, N)))
                          + pop.beta * theta * psi_log_slope_numeric(N, scheme, pop.beta * (theta + delta(game, N))))
        assert np.sign(exact) == np.sign(fd) == cf_sign
        assert exact == pytest.approx(fd, rel=1e-5, abs=1e-6)


@pytest.mark.parametrize("game", [DonationGame(1.8, 1), PublicGoodsGame(3, 5, 1)])
def test_exact_and_matrix_derivative_agree(game):
    pop = PopulationConfig(12, 4.0)
    for theta in np.linspace(0.2, 4, 15):
        for scheme in ("reward", "punishment"):
            assert cost_derivative(game, pop, scheme, theta, method="exact") == pytest.approx(
                cost_derivative(game, pop, scheme, theta, method="matrix"), rel=1e-9, abs=1e-9)


def test_derivative_changes_sign_twice_n3(dg18):
    pop = PopulationConfig(3, 10)
    theta = np.linspace(1e-3, 5, 50001)
    s = np.sign(cost_profile(dg18, pop, "reward").derivative(theta))
    assert np.count_nonzero(s[1:] != s[:-1]) == 2


def test_second_derivative_stays_bounded(dg18):
    """No kinks: the finite-difference curvature converges as the step shrinks."""
    pop = PopulationConfig(8, 6.0)
    f = lambda t: expected_cost(dg18, pop, "reward", t)  # noqa: E731
    for theta in (0.5, 1.3, 2.0, 3.7):
        curv = [(f(theta + h) - 2 * f(theta) + f(theta - h)) / h**2 for h in (1e-2, 3e-3, 1e-3)]
        assert max(abs(c) for c in curv) < 1e4
        assert curv[-1] == pytest.approx(curv[-2], rel=1e-2, abs=1e-2)
