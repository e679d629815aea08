import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incentive_cost.chain import as_scheme, cooperation_frequency
from incentive_cost.cost import cost_profile, expected_cost
from incentive_cost.games import DonationGame, PopulationConfig, PublicGoodsGame, delta
from incentive_cost.phase import (
    Branch,
    _critical,
    analyze,
    beta_star,
    decreasing_regions,
    derivative_sign_changes,
    f_star,
    find_u1,
    find_u2,
    monotonicity_profile,
    optimize,
)


def test_f_star_n3():
    F, us = f_star(3, "reward")
    assert F == pytest.approx(10.9291, abs=1e-3)
    assert us == pytest.approx(4.29712, abs=1e-4)
    # the minimiser sits where P > 0, beyond the positive root of 4u^2 - 2u - 5
    assert us > (1 + math.sqrt(21)) / 4


def test_f_star_n3_punishment():
    F, us = f_star(3, "punishment")
    root = (-1 + math.sqrt(21)) / 5  # positive root of 5u^2 + 2u - 4
    (a, b), = decreasing_regions(3, "punishment")
    assert a == pytest.approx(root, rel=1e-12) and b == math.inf
    assert F == pytest.approx(5.1151, abs=1e-4)
    assert us == pytest.approx(3.4460, abs=1e-4)
    assert _critical(3, as_scheme("punishment")).F(us) == pytest.approx(F, rel=1e-12)


def test_beta_star_examples(dg18):
    assert beta_star(dg18, 3, "reward") == pytest.approx(5.752, abs=1e-3)
    assert f_star(50, "reward")[0] == pytest.approx(3.15, abs=1e-2)
    assert beta_star(dg18, 50, "reward") == pytest.approx(3.039, abs=2e-3)


@settings(max_examples=30, deadline=None)
@given(N=st.sampled_from([3, 5, 10]), c=st.floats(0.1, 5), ratio=st.floats(1.05, 4))
def test_beta_star_scaling(N, c, ratio):
    game = DonationGame(ratio * c, c)
    assert beta_star(game, N, "reward") * -delta(game, N) == pytest.approx(f_star(N, "reward")[0], rel=1e-12)


def test_f_star_minimises_on_decreasing_region():
    cf = _critical(3, as_scheme("reward"))
    F, us = f_star(3, "reward")
    grid = np.geomspace(1.3, 1e4, 20000)
    grid = grid[[cf.P_value(g) > 0 for g in grid]]
    assert np.all(cf.F(grid) >= F - 1e-9)


def test_u_roots_n3(dg18):
    d = delta(dg18, 3)
    F, us = f_star(3, "reward")
    u2 = find_u2(3, "reward", 10, d)
    u1 = find_u1(3, "reward", 10, d)
    cf = _critical(3, as_scheme("reward"))
    assert abs(cf.F(u2) + 10 * d) <= 1e-10 * abs(10 * d)
    assert abs(cf.F(u1) + 10 * d) <= 1e-10 * abs(10 * d)
    assert u1 < us < u2
    assert math.log(u2) / 10 - d == pytest.approx(2.16, abs=1e-2)


def test_u_roots_below_threshold(dg18):
    with pytest.raises(ValueError):
        find_u2(3, "reward", 1.0, delta(dg18, 3))
    with pytest.raises(ValueError):
        find_u1(3, "reward", 1.0, delta(dg18, 3))


def test_u_roots_at_threshold(dg18):
    d = delta(dg18, 3)
    b = beta_star(dg18, 3, "reward")
    assert find_u2(3, "reward", b, d) == f_star(3, "reward")[1]


@pytest.mark.parametrize("omega, theta, cost, branch", [
    (0.25, 1.845, 23.602, Branch.ABOVE_THRESHOLD_THETA0),
    (0.7, 2.16, 25.6124, Branch.ABOVE_THRESHOLD_THETA2),
    (0.999999, 2.59078, None, Branch.ABOVE_THRESHOLD_THETA0),
])
def test_optimize_examples(dg18, omega, theta, cost, branch):
    res = optimize(dg18, PopulationConfig(3, 10), "reward", omega)
    assert res.branch is branch
    assert res.theta_star == pytest.approx(theta, abs=1e-2 if branch is Branch.ABOVE_THRESHOLD_THETA2 else 1e-3)
    if cost is not None:
        assert res.cost_star == pytest.approx(cost, abs=1e-3)
    assert res.cost_theta2 is None or res.cost_theta2 == pytest.approx(25.6124, abs=1e-3)
    if omega == 0.7:
        assert res.cost_theta0 == pytest.approx(26.446, abs=1e-2)
    if omega == 0.999999:
        assert res.theta_star == pytest.approx(2.59078, abs=1e-4)
        assert res.theta2 < res.theta0


def test_optimize_below_threshold(dg18):
    res = optimize(dg18, PopulationConfig(3, 1), "reward", 0.7)
    assert res.branch is Branch.BELOW_THRESHOLD
    assert res.theta_star == pytest.approx(2.3236, abs=1e-4)
    assert res.u2 is None


@pytest.mark.parametrize("game, N, beta, scheme", [
    (DonationGame(1.8, 1), 3, 10, "reward"),
    (DonationGame(1.8, 1), 3, 10, "punishment"),
    (DonationGame(1.8, 1), 10, 6, "reward"),
    (DonationGame(1.8, 1), 50, 5, "reward"),
    (PublicGoodsGame(3, 5, 1), 20, 4, "punishment"),
])
@pytest.mark.parametrize("omega", [0.25, 0.7, 0.99])
def test_optimize_is_global_minimum(game, N, beta, scheme, omega):
    pop = PopulationConfig(N, beta)
    res = optimize(game, pop, scheme, omega)
    assert cooperation_frequency(game, pop, res.theta_star) >= omega - 1e-9
    grid = np.linspace(res.theta0, res.theta0 + 10, 1000)
    costs = cost_profile(game, pop, scheme).cost(grid)
    assert res.cost_star <= costs.min() * (1 + 1e-9)


@settings(max_examples=25, deadline=None)
@given(N=st.integers(3, 12), beta=st.floats(0.1, 30), omega=st.floats(0.05, 0.995),
       scheme=st.sampled_from(["reward", "punishment"]))
def test_branch_consistency(N, beta, omega, scheme):
    dg18 = DonationGame(1.8, 1)
    pop = PopulationConfig(N, beta)
    res = optimize(dg18, pop, scheme, omega)
    if beta <= res.beta_star:
        assert res.branch is Branch.BELOW_THRESHOLD and res.theta_star == res.theta0
    elif res.branch is Branch.ABOVE_THRESHOLD_THETA2:
        assert res.theta2 > res.theta0 and res.cost_theta2 < res.cost_theta0
    else:
        assert res.theta_star == res.theta0


def test_theta2_is_local_minimum(dg18):
    pop = PopulationConfig(3, 10)
    res = optimize(dg18, pop, "reward", 0.7)
    f = lambda t: expected_cost(dg18, pop, "reward", t)  # noqa: E731
    for h in (1e-3, 1e-2):
        assert f(res.theta2) < f(res.theta2 - h) and f(res.theta2) < f(res.theta2 + h)


@pytest.mark.parametrize("scheme", ["reward", "punishment"])
def test_monotonicity_profile(dg18, scheme):
    b = beta_star(dg18, 10, scheme)
    mono = monotonicity_profile(dg18, PopulationConfig(10, b / 2), scheme)
    assert mono.monotone and mono.sign_changes == 0
    two = monotonicity_profile(dg18, PopulationConfig(10, 2 * b), scheme)
    assert not two.monotone and two.sign_changes == 2
    assert 0 < two.theta1 < two.theta2


def test_sign_changes_large_population(dg18):
    b = beta_star(dg18, 100, "reward")
    assert derivative_sign_changes(dg18, PopulationConfig(100, 2 * b), "reward") == 2
    assert derivative_sign_changes(dg18, PopulationConfig(100, b / 2), "reward") == 0


def test_heuristic_flag_above_n0(dg18):
    assert not analyze(dg18, 100, "reward").heuristic
    an = analyze(dg18, 101, "reward")
    assert an.heuristic and an.beta_star > 0 and an.P_roots
    with pytest.warns(UserWarning, match="conjectured"):
        res = optimize(dg18, PopulationConfig(101, 2 * an.beta_star), "reward", 0.7)
    assert res.heuristic


def test_optimize_validation(dg18):
    with pytest.raises(ValueError):
        optimize(dg18, PopulationConfig(3, 10), "reward", 1.0)
    with pytest.raises(ValueError):
        optimize(dg18, PopulationConfig(3, 10), "reward", 0.0)
    with pytest.raises(ValueError):
        optimize(dg18, PopulationConfig(3, 0), "reward", 0.5)
    with pytest.raises(ValueError):
        f_star(2, "reward")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        res = optimize(dg18, PopulationConfig(3, 10), "reward", 0.25)
    assert any("omega < 0.5" in w for w in res.warnings)
