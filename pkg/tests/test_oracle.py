import itertools

import numpy as np
import pytest

from maxrank.graph import CostAssignment, WebGraph
from maxrank.oracle import (
    ExplicitAction,
    PolytopeWitness,
    action_to_witness,
    bias_linear_oracle,
    check_membership,
    enumerate_bellman,
    enumerate_policies,
    monte_carlo_bias,
)
from maxrank.solver import MaxRankParams, apply_T, value_iteration

from helpers import random_web_graph


def costs_of(values):
    values = np.asarray(values, dtype=np.float64)
    return CostAssignment(
        values,
        np.zeros(len(values), dtype=np.int8),
        np.zeros(len(values), dtype=np.int8),
    )


def two_cycle():
    return WebGraph.from_edges(2, np.array([0, 1]), np.array([1, 0]))


def demo_graph():
    # page 0 links 1,2,3; page 1 links 2; pages 2,3 link back to 0
    return WebGraph.from_edges(
        4, np.array([0, 0, 0, 1, 2, 3]), np.array([1, 2, 3, 2, 0, 0]))


def test_action_witness_keep_none():
    g = demo_graph()
    a = ExplicitAction(page=0, teleport_set=(1, 3), kept_set=())
    wit = action_to_witness(a, g)
    assert wit.sigma.tolist() == [1.0, 0.0, 0.0, 0.0]
    assert wit.nu.tolist() == [0.0, 0.5, 0.0, 0.5]
    assert np.array_equal(wit.w[0], wit.nu)
    ok, violation = check_membership(wit, 0, g, N=2)
    assert ok and violation is None


def test_action_witness_keep_two():
    g = demo_graph()
    a = ExplicitAction(page=0, teleport_set=(0, 1), kept_set=(1, 3))
    wit = action_to_witness(a, g)
    assert wit.sigma.tolist() == [0.0, 0.0, 1.0, 0.0]
    assert wit.nu.tolist() == [0.0, 0.5, 0.0, 0.5]
    assert np.array_equal(wit.w[2], wit.nu)
    ok, violation = check_membership(wit, 0, g, N=2)
    assert ok and violation is None


def test_every_extreme_point_is_a_member():
    g = demo_graph()
    N = 2
    for x in range(g.n):
        nbrs = [int(t) for t in g.out_neighbors(x)]
        kept_choices = [()]
        for size in range(1, len(nbrs) + 1):
            kept_choices.extend(itertools.combinations(nbrs, size))
        for I in itertools.combinations(range(g.n), N):
            for J in kept_choices:
                wit = action_to_witness(ExplicitAction(x, I, tuple(J)), g)
                ok, violation = check_membership(wit, x, g, N)
                assert ok, violation


def test_random_mixtures_stay_inside():
    rng = np.random.default_rng(67)
    g = demo_graph()
    N = 2
    nbrs = [int(t) for t in g.out_neighbors(0)]
    kept_choices = [()]
    for size in range(1, len(nbrs) + 1):
        kept_choices.extend(itertools.combinations(nbrs, size))
    actions = [ExplicitAction(0, I, tuple(J))
               for I in itertools.combinations(range(g.n), N)
               for J in kept_choices]
    for _ in range(50):
        picks = rng.choice(len(actions), size=3, replace=False)
        weights = rng.dirichlet(np.ones(3))
        parts = [action_to_witness(actions[k], g) for k in picks]
        wit = PolytopeWitness(
            sum(t * p.sigma for t, p in zip(weights, parts)),
            sum(t * p.nu for t, p in zip(weights, parts)),
            sum(t * p.w for t, p in zip(weights, parts)),
        )
        ok, violation = check_membership(wit, 0, g, N)
        assert ok, violation


def test_violations_are_detected_and_named():
    g = demo_graph()
    N = 2
    base = action_to_witness(ExplicitAction(0, (0, 1), (1, 3)), g)

    def fresh():
        return base.sigma.copy(), base.nu.copy(), base.w.copy()

    sigma, nu, w = fresh()
    sigma *= 1.5
    ok, name = check_membership(PolytopeWitness(sigma, nu, w), 0, g, N)
    assert not ok and name == "sigma_sum"

    sigma, nu, w = fresh()
    sigma[0] -= 0.25
    sigma[1] += 0.25
    ok, name = check_membership(PolytopeWitness(sigma, nu, w), 0, g, N)
    assert not ok and name == "sigma_nonneg[d=0]"

    sigma, nu, w = fresh()
    nu[1] += 0.25
    ok, name = check_membership(PolytopeWitness(sigma, nu, w), 0, g, N)
    assert not ok and name == "nu_decomposition[j=1]"

    sigma, nu, w = fresh()
    w[2] *= 2.0
    nu = w.sum(axis=0)  # keep the decomposition consistent
    ok, name = check_membership(PolytopeWitness(sigma, nu, w), 0, g, N)
    assert not ok and name == "layer_mass[d=2]"

    # teleport layer: pile the whole keep-none mass on one page (cap is 1/N)
    wit0 = action_to_witness(ExplicitAction(0, (0, 1), ()), g)
    sigma, nu, w = wit0.sigma.copy(), wit0.nu.copy(), wit0.w.copy()
    w[0, 0] = 1.0
    w[0, 1] = 0.0
    nu = w.sum(axis=0)
    ok, name = check_membership(PolytopeWitness(sigma, nu, w), 0, g, N)
    assert not ok and name == "teleport_layer_bound[j=0]"

    # put kept-link mass on a page that is not an out-neighbor of 0
    sigma, nu, w = fresh()
    w[2, 0] = 0.2
    w[2, 1] = 0.3
    nu = w.sum(axis=0)
    ok, name = check_membership(PolytopeWitness(sigma, nu, w), 0, g, N)
    assert not ok and name == "off_neighbor_zero[d=2,j=0]"

    # overload one kept link beyond sigma_d/d
    sigma, nu, w = fresh()
    w[2, 1] = 0.8
    w[2, 3] = 0.2
    nu = w.sum(axis=0)
    ok, name = check_membership(PolytopeWitness(sigma, nu, w), 0, g, N)
    assert not ok and name == "link_layer_bound[d=2,j=1]"


def test_membership_rejects_wrong_shapes():
    g = demo_graph()
    wit = action_to_witness(ExplicitAction(0, (0, 1), ()), g)
    with pytest.raises(ValueError):
        check_membership(wit, 1, g, N=2)  # page 1 has degree 1, not 3


def test_enumerate_bellman_matches_operator():
    rng = np.random.default_rng(71)
    p = MaxRankParams(alpha=0.85, gamma=0.5, teleport_fraction=0.5)
    for _ in range(15):
        n = int(rng.integers(2, 6))
        g = random_web_graph(rng, n, max_out=3)
        c = costs_of(rng.uniform(-1, 1, size=n))
        v = rng.normal(size=n)
        want = enumerate_bellman(v, g, c, p)
        got = apply_T(v, g, c, p)
        assert np.allclose(got, want, atol=1e-12, rtol=0)


def test_enumerate_policies_zero_costs():
    g = two_cycle()
    lam, policy = enumerate_policies(g, CostAssignment.zeros(2),
                                     MaxRankParams(teleport_fraction=0.5))
    assert lam == 0.0
    assert len(policy) == 2


def test_enumerate_policies_self_loop():
    g = WebGraph.from_edges(1, np.array([0]), np.array([0]))
    lam, _ = enumerate_policies(g, costs_of([5.0]),
                                MaxRankParams(teleport_fraction=1.0))
    assert lam == pytest.approx(5.0, abs=1e-12)


def test_enumerate_policies_matches_solver():
    g = two_cycle()
    c = costs_of([1.0, 0.0])
    p = MaxRankParams(gamma=12.0, teleport_fraction=0.5, eps=1e-11)
    sol = value_iteration(g, c, p)
    lam, _ = enumerate_policies(g, c, p)
    assert sol.converged
    assert lam == pytest.approx(sol.lam, abs=1e-9)


def test_enumerate_policies_handles_multichain_optimum():
    # gamma 0 lets each page drop its link and teleport to itself, giving
    # two absorbing states; the best policy parks on the free page
    g = two_cycle()
    c = costs_of([1.0, 0.0])
    p = MaxRankParams(gamma=0.0, teleport_fraction=0.5, eps=1e-11)
    lam, policy = enumerate_policies(g, c, p)
    assert lam == 0.0
    assert policy[0].teleport_set == (0,)
    assert policy[0].kept_set == ()
    assert policy[1].teleport_set == (1,)
    assert policy[1].kept_set == ()
    sol = value_iteration(g, c, p)
    assert sol.lam == pytest.approx(0.0, abs=1e-11)


def test_enumerate_policies_budget_guard():
    rng = np.random.default_rng(73)
    g = random_web_graph(rng, 8, max_out=4, allow_dangling=False)
    with pytest.raises(ValueError, match="policies"):
        enumerate_policies(g, CostAssignment.zeros(8),
                           MaxRankParams(teleport_fraction=0.25))


def test_bias_linear_oracle_closed_forms():
    g = two_cycle()
    v = bias_linear_oracle(g, np.array([1.0, 0.0]), 0.85)
    assert v == pytest.approx([1 / (1 - 0.85**2), 0.85 / (1 - 0.85**2)],
                              abs=1e-12)
    v = bias_linear_oracle(g, np.array([3.0, 3.0]), 0.85)
    assert v == pytest.approx([3 / 0.15, 3 / 0.15], abs=1e-9)


def test_bias_linear_oracle_matches_power_series():
    rng = np.random.default_rng(79)
    g = random_web_graph(rng, 20, allow_dangling=False)
    c = rng.uniform(-1, 1, size=20)
    v = bias_linear_oracle(g, c, 0.85)
    S = np.zeros((20, 20))
    for i in range(20):
        nbrs = g.out_neighbors(i)
        S[i, nbrs] = 1.0 / len(nbrs)
    term = c.copy()
    total = c.copy()
    for _ in range(400):
        term = 0.85 * (S @ term)
        total += term
    assert np.allclose(v, total, atol=1e-9)


def test_bias_linear_oracle_rejects_dangling():
    g = WebGraph.from_edges(2, np.array([0]), np.array([1]))
    with pytest.raises(ValueError):
        bias_linear_oracle(g, np.zeros(2), 0.85)


def test_monte_carlo_is_deterministic_and_unbiased():
    g = two_cycle()
    c = np.array([1.0, 0.0])
    mean1, err1 = monte_carlo_bias(g, c, 0.85, page=0, walks=200_000,
                                   rng_seed=4)
    mean2, err2 = monte_carlo_bias(g, c, 0.85, page=0, walks=200_000,
                                   rng_seed=4)
    assert mean1 == mean2 and err1 == err2
    assert err1 > 0
    truth = 1 / (1 - 0.85**2)
    assert abs(mean1 - truth) <= 3 * err1


def test_monte_carlo_zero_costs_and_edge_cases():
    g = two_cycle()
    mean, err = monte_carlo_bias(g, np.zeros(2), 0.85, page=1, walks=100,
                                 rng_seed=1)
    assert mean == 0.0 and err == 0.0
    mean, err = monte_carlo_bias(g, np.ones(2), 0.85, page=0, walks=1,
                                 rng_seed=1)
    assert err == 0.0
    with pytest.raises(ValueError):
        monte_carlo_bias(g, np.zeros(2), 0.85, page=0, walks=0, rng_seed=1)
    dangling = WebGraph.from_edges(2, np.array([0]), np.array([1]))
    with pytest.raises(ValueError):
        monte_carlo_bias(dangling, np.zeros(2), 0.85, page=0, walks=10,
                         rng_seed=1)
