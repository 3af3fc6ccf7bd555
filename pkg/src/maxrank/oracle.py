"""Brute-force verifiers for tiny instances.

Everything here is deliberately independent of the solver: explicit action
enumeration, dense linear algebra, and plain Monte Carlo, used by the test
suite to certify the fast implementations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .graph import CostAssignment, WebGraph
from .solver import MaxRankParams

# Membership checks run in this order; reported violations name the first
# constraint group that fails, with the offending index.
_CONSTRAINTS = (
    "sigma_sum",            # layer weights sum to 1
    "sigma_nonneg",         # layer weights nonnegative
    "nu_decomposition",     # nu_j equals the sum of its layers
    "layer_mass",           # layer d carries total mass sigma_d
    "teleport_layer_bound", # 0 <= w[0,j] <= sigma_0/N
    "off_neighbor_zero",    # w[d,j] = 0 off the out-neighbor set, d >= 1
    "link_layer_bound",     # 0 <= w[d,j] <= sigma_d/d on out-neighbors
)


@dataclass(frozen=True)
class ExplicitAction:
    """One admissible control at a page: teleport set I and kept links J."""

    page: int
    teleport_set: tuple[int, ...]
    kept_set: tuple[int, ...]


@dataclass(frozen=True)
class PolytopeWitness:
    """Candidate (sigma, nu, w) point of the per-page action polytope."""

    sigma: np.ndarray  # length D_x+1
    nu: np.ndarray  # length n
    w: np.ndarray  # (D_x+1, n), nu split into per-kept-degree layers


def _teleport_dist(n: int, teleport_set) -> np.ndarray:
    z = np.zeros(n)
    z[list(teleport_set)] = 1.0 / len(teleport_set)
    return z


def _action_nu(a: ExplicitAction, n: int) -> np.ndarray:
    if a.kept_set:
        nu = np.zeros(n)
        nu[list(a.kept_set)] = 1.0 / len(a.kept_set)
        return nu
    return _teleport_dist(n, a.teleport_set)


def action_to_witness(a: ExplicitAction, g: WebGraph) -> PolytopeWitness:
    """The extreme point (sigma, nu, w) realized by an explicit action."""
    D = g.out_degree(a.page)
    d = len(a.kept_set)
    sigma = np.zeros(D + 1)
    sigma[d] = 1.0
    nu = _action_nu(a, g.n)
    w = np.zeros((D + 1, g.n))
    w[d] = nu
    return PolytopeWitness(sigma, nu, w)


def check_membership(wit: PolytopeWitness, x: int, g: WebGraph, N: int,
                     tol: float = 1e-12):
    """Test the seven constraint groups; returns (ok, violation or None).

    A violation is reported as "name[index]" for the first failing check.
    """
    D = g.out_degree(x)
    sigma, nu, w = wit.sigma, wit.nu, wit.w
    if sigma.shape != (D + 1,) or nu.shape != (g.n,) or w.shape != (D + 1, g.n):
        raise ValueError("witness dimensions do not match the page")
    neighbors = np.zeros(g.n, dtype=bool)
    neighbors[g.out_neighbors(x)] = True

    if abs(float(sigma.sum()) - 1.0) > tol:
        return False, "sigma_sum"
    for d in range(D + 1):
        if sigma[d] < -tol:
            return False, f"sigma_nonneg[d={d}]"
    for j in range(g.n):
        if abs(nu[j] - float(w[:, j].sum())) > tol:
            return False, f"nu_decomposition[j={j}]"
    for d in range(D + 1):
        if abs(float(w[d].sum()) - sigma[d]) > tol:
            return False, f"layer_mass[d={d}]"
    cap0 = sigma[0] / N
    for j in range(g.n):
        if w[0, j] < -tol or w[0, j] > cap0 + tol:
            return False, f"teleport_layer_bound[j={j}]"
    for d in range(1, D + 1):
        for j in range(g.n):
            if not neighbors[j]:
                if abs(w[d, j]) > tol:
                    return False, f"off_neighbor_zero[d={d},j={j}]"
            elif w[d, j] < -tol or w[d, j] > sigma[d] / d + tol:
                return False, f"link_layer_bound[d={d},j={j}]"
    return True, None


def enumerate_bellman(v: np.ndarray, g: WebGraph, costs: CostAssignment,
                      p: MaxRankParams) -> np.ndarray:
    """T(v) by explicit minimization over every action (I, J) per page."""
    n = g.n
    N = p.teleport_count(n)
    v = np.asarray(v, dtype=np.float64)
    teleport_best = min(
        float(np.mean(v[list(I)])) for I in itertools.combinations(range(n), N)
    )
    out = np.empty(n)
    for x in range(n):
        D = g.out_degree(x)
        c = float(costs.costs[x])
        if D == 0:
            out[x] = c + p.alpha * teleport_best
            continue
        best = c + p.gamma + p.alpha * teleport_best
        nbrs = g.out_neighbors(x)
        for size in range(1, D + 1):
            for J in itertools.combinations(nbrs, size):
                w = (c + p.gamma * (D - size) / D
                     + p.alpha * float(np.mean(v[list(J)])))
                if w < best:
                    best = w
        out[x] = best
    return out


def _page_actions(g: WebGraph, costs: CostAssignment, p: MaxRankParams,
                  x: int, N: int):
    """All (action, transition row, step cost, support mask) for page x."""
    D = g.out_degree(x)
    nbrs = [int(t) for t in g.out_neighbors(x)]
    kept_choices = [()]
    if D > 0:
        for size in range(1, D + 1):
            kept_choices.extend(itertools.combinations(nbrs, size))
    actions = []
    for I in itertools.combinations(range(g.n), N):
        z = _teleport_dist(g.n, I)
        for J in kept_choices:
            a = ExplicitAction(x, I, tuple(J))
            nu = _action_nu(a, g.n)
            row = p.alpha * nu + (1.0 - p.alpha) * z
            cost = float(costs.costs[x])
            if D > 0:
                cost += p.gamma * (D - len(J)) / D
            mask = 0
            for j in np.flatnonzero(row > 0):
                mask |= 1 << int(j)
            actions.append((a, row, cost, mask))
    return actions


def _recurrent_classes(masks: list[int], n: int) -> list[tuple[int, ...]]:
    """Closed recurrent classes of a chain given per-state support masks."""
    reach = list(masks)
    for x in range(n):
        r = (1 << x) | reach[x]
        while True:
            grown = r
            probe = r
            while probe:
                y = probe & -probe
                grown |= reach[y.bit_length() - 1]
                probe ^= y
            if grown == r:
                break
            r = grown
        reach[x] = r
    classes = set()
    for x in range(n):
        if all(reach[y.bit_length() - 1] & (1 << x)
               for y in _bits(reach[x])):
            classes.add(reach[x])
    return [tuple(i for i in range(n) if mask >> i & 1) for mask in sorted(classes)]


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low
        mask ^= low


def _class_stationary(P: np.ndarray, states: tuple[int, ...],
                      tol: float = 1e-12) -> np.ndarray:
    """Stationary distribution of an irreducible closed class, dense solve."""
    sub = P[np.ix_(states, states)]
    k = len(states)
    A = sub.T - np.eye(k)
    A[-1, :] = 1.0
    b = np.zeros(k)
    b[-1] = 1.0
    pi = np.linalg.solve(A, b)
    if np.max(np.abs(pi @ sub - pi)) > tol or abs(pi.sum() - 1.0) > tol:
        raise ArithmeticError("stationary solve failed its residual check")
    return pi


def enumerate_policies(g: WebGraph, costs: CostAssignment, p: MaxRankParams,
                       budget: int = 10_000_000):
    """Exhaustive search over deterministic stationary policies.

    Every combination of one explicit action per page is evaluated: the
    induced chain is decomposed into its closed recurrent classes and the
    policy's value is the smallest class average cost (teleportation lets
    the controller steer into the best class from anywhere, and the solver's
    lambda is constant across states).  Returns (best_lambda, best_policy)
    with the lexicographically first argmin in per-page action order.
    """
    n = g.n
    N = p.teleport_count(n)
    per_page = [_page_actions(g, costs, p, x, N) for x in range(n)]
    total = 1
    for acts in per_page:
        total *= len(acts)
        if total > budget:
            raise ValueError(f"instance too large: more than {budget} policies")

    best_lambda = np.inf
    best_policy = None
    for combo in itertools.product(*per_page):
        masks = [entry[3] for entry in combo]
        P = np.stack([entry[1] for entry in combo])
        c = np.array([entry[2] for entry in combo])
        value = np.inf
        for states in _recurrent_classes(masks, n):
            pi = _class_stationary(P, states)
            value = min(value, float(pi @ c[list(states)]))
        if value < best_lambda:
            best_lambda = value
            best_policy = [entry[0] for entry in combo]
    return best_lambda, best_policy


def bias_linear_oracle(g: WebGraph, c_prime: np.ndarray, alpha: float) -> np.ndarray:
    """Dense solve of v = c' + alpha*S*v on a dangling-free graph."""
    deg = g.out_degrees()
    if np.any(deg == 0):
        raise ValueError("dangling page present")
    if g.n > 2000:
        raise ValueError("instance too large for a dense solve")
    S = np.zeros((g.n, g.n))
    for i in range(g.n):
        S[i, g.out_neighbors(i)] = 1.0 / deg[i]
    return np.linalg.solve(np.eye(g.n) - alpha * S, np.asarray(c_prime, float))


def monte_carlo_bias(g: WebGraph, c_prime: np.ndarray, alpha: float, page: int,
                     walks: int, rng_seed: int):
    """Sample mean and standard error of the discounted-visit cost.

    Each walk starts at ``page``, pays c' at every visited page including
    the start, follows a uniformly random out-link, and stops with
    probability 1-alpha before each step.
    """
    if walks < 1:
        raise ValueError("need at least one walk")
    deg = g.out_degrees()
    if np.any(deg == 0):
        raise ValueError("dangling page present")
    c_prime = np.asarray(c_prime, dtype=np.float64)
    rng = np.random.default_rng(rng_seed)
    pos = np.full(walks, page, dtype=np.int64)
    totals = np.full(walks, c_prime[page])
    active = np.arange(walks)
    while len(active):
        cont = rng.random(len(active)) < alpha
        active = active[cont]
        if not len(active):
            break
        cur = pos[active]
        pick = (rng.random(len(active)) * deg[cur]).astype(np.int64)
        nxt = g.targets[g.offsets[cur] + pick]
        pos[active] = nxt
        totals[active] += c_prime[nxt]
    mean = float(np.mean(totals))
    if walks == 1:
        return mean, 0.0
    stderr = float(np.std(totals, ddof=1) / np.sqrt(walks))
    return mean, stderr
