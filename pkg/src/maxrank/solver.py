"""Average-cost control of the random surfer: the MaxRank solver.

The controller picks, at every page, a teleport set I of fixed size N and
a subset J of the page's out-links to keep, paying the page cost c' plus
a removal penalty gamma*(D-|J|)/D.  Value iteration on the alpha-contracting
Bellman operator T yields the bias vector v (the spamicity score), the
optimal average cost lambda = (1-alpha)*min_z z.v, the optimal policy, and
the stationary distribution of the optimal chain (the demoted ranking).

Each candidate kept-degree d is scored as

    w0 = c' + gamma + alpha/(1-alpha)*lambda          (remove everything)
    wd = c' + gamma*(D-d)/D + (alpha/d)*(sum of the d smallest neighbor v)

and v_i is the minimum over d.  Keeping the d smallest-bias out-neighbors
is optimal for each fixed d, which reduces the minimization to one sort.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .graph import CostAssignment, WebGraph
from .kernels import bellman_sweep_gs, bellman_sweep_jacobi_range, page_bellman
from .ranking import ConvergenceError, ScoreKind, ScoreVector, TeleportVector, pagerank


@dataclass(frozen=True)
class MaxRankParams:
    alpha: float = 0.85
    gamma: float = 4.0
    teleport_fraction: float = 0.89
    eps: float = 1e-8
    max_iters: int = 1000

    def __post_init__(self):
        if not 0 <= self.alpha < 1:
            raise ValueError("alpha must be in [0, 1)")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if not 0 < self.teleport_fraction <= 1:
            raise ValueError("teleport_fraction must be in (0, 1]")
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")

    def teleport_count(self, n: int) -> int:
        """Teleport-set size N = max(1, round(tau*n)), capped at n."""
        if n < 1:
            raise ValueError("graph has no pages")
        return min(n, max(1, int(self.teleport_fraction * n + 0.5)))


def teleport_lambda(v: np.ndarray, N: int, alpha: float) -> float:
    """(1-alpha)/N times the sum of the N smallest entries of v.

    Equals (1-alpha)*min over admissible teleportation vectors z of z.v.
    """
    v = np.asarray(v, dtype=np.float64)
    if not 1 <= N <= len(v):
        raise ValueError("N must be in [1, n]")
    smallest = np.sort(np.partition(v, N - 1)[:N])
    return (1.0 - alpha) / N * float(np.sum(smallest))


def bellman_update_page(i: int, v: np.ndarray, lam: float, g: WebGraph,
                        costs: CostAssignment, p: MaxRankParams):
    """One Bellman minimization at page i; returns (value, d_star).

    The caller supplies lam = teleport_lambda for the v snapshot in use.
    Ties between kept-degrees resolve to the smallest d.
    """
    tterm = p.alpha / (1.0 - p.alpha) * lam
    vs = np.sort(v[g.out_neighbors(i)])
    return page_bellman(g.out_degree(i), vs, float(costs.costs[i]), p.gamma,
                        p.alpha, tterm)


def _chunk_bounds(n: int, threads: int) -> list[int]:
    threads = max(1, min(threads, n))
    return [n * t // threads for t in range(threads + 1)]


def _jacobi_image(v, g, costs, p, N, threads, out, dstar):
    """Fill out/dstar with T(v) and the minimizing kept-degrees; returns lam."""
    lam = teleport_lambda(v, N, p.alpha)
    tterm = p.alpha / (1.0 - p.alpha) * lam
    bounds = _chunk_bounds(g.n, threads)
    if len(bounds) == 2:
        bellman_sweep_jacobi_range(g.offsets, g.targets, v, costs.costs,
                                   p.gamma, p.alpha, tterm, out, dstar, 0, g.n)
    else:
        # pages are write-disjoint, so any chunking gives identical output
        with ThreadPoolExecutor(max_workers=len(bounds) - 1) as pool:
            futures = [
                pool.submit(bellman_sweep_jacobi_range, g.offsets, g.targets,
                            v, costs.costs, p.gamma, p.alpha, tterm, out,
                            dstar, lo, hi)
                for lo, hi in zip(bounds[:-1], bounds[1:])
            ]
            for f in futures:
                f.result()
    return lam


def apply_T(v: np.ndarray, g: WebGraph, costs: CostAssignment,
            p: MaxRankParams, threads: int = 1) -> np.ndarray:
    """Jacobi application of the Bellman operator against the unmodified v."""
    v = np.ascontiguousarray(v, dtype=np.float64)
    out = np.empty(g.n)
    dstar = np.empty(g.n, dtype=np.int64)
    _jacobi_image(v, g, costs, p, p.teleport_count(g.n), threads, out, dstar)
    return out


@dataclass(frozen=True)
class MaxRankSolution:
    bias: ScoreVector
    lam: float
    kept_degree: np.ndarray
    kept_graph: WebGraph
    teleport_set: np.ndarray
    stationary: ScoreVector | None
    residual: float
    sweeps: int
    converged: bool

    def kept_links(self, i: int) -> np.ndarray:
        """The d*_i retained out-neighbors of page i (smallest-bias ones)."""
        return self.kept_graph.out_neighbors(i)


@dataclass(frozen=True)
class PolicyChain:
    """Transition rows of the optimal chain: alpha*nu*(x) + (1-alpha)*z*.

    nu*(x) is uniform on the kept out-links, or z* itself when none are
    kept; z* is uniform on the teleport set.
    """

    kept_graph: WebGraph
    teleport_set: np.ndarray
    alpha: float

    def row(self, x: int) -> np.ndarray:
        n = self.kept_graph.n
        z = np.zeros(n)
        z[self.teleport_set] = 1.0 / len(self.teleport_set)
        kept = self.kept_graph.out_neighbors(x)
        if len(kept) == 0:
            return z
        r = (1.0 - self.alpha) * z
        r[kept] += self.alpha / len(kept)
        return r


def stationary_distribution(chain: PolicyChain, eps: float = 1e-10,
                            max_iters: int = 200) -> ScoreVector:
    """Invariant distribution of the optimal chain, by power iteration."""
    z = TeleportVector(chain.kept_graph.n, chain.teleport_set)
    return pagerank(chain.kept_graph, z, chain.alpha, eps, max_iters)


def _extract_policy(v, dstar, g: WebGraph):
    """Kept-link subgraph: for each page the d*_i smallest-bias out-neighbors.

    Ties in neighbor bias resolve toward the smaller page id (stable sort
    over id-ascending neighbor lists).
    """
    kept_offsets = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(dstar, out=kept_offsets[1:])
    kept_targets = np.empty(int(kept_offsets[-1]), dtype=np.int64)
    for i in range(g.n):
        d = int(dstar[i])
        if d == 0:
            continue
        nbrs = g.out_neighbors(i)
        order = np.argsort(v[nbrs], kind="stable")
        kept_targets[kept_offsets[i]:kept_offsets[i + 1]] = np.sort(nbrs[order[:d]])
    return WebGraph(g.n, kept_offsets, kept_targets)


def value_iteration(g: WebGraph, costs: CostAssignment, p: MaxRankParams,
                    mode: str = "gauss-seidel", threads: int = 1) -> MaxRankSolution:
    """Algorithm: sweep until the Jacobi residual ||v - T(v)||_inf < eps.

    Gauss-Seidel sweeps (default) update v in place in page order, with
    lambda recomputed once per sweep from the pre-sweep v; Jacobi sweeps
    adopt the two-buffer image and are deterministic for any thread count.
    The stopping test and the reported residual always come from a Jacobi
    evaluation at the returned v, so the certificate is order-independent.
    """
    if mode not in ("gauss-seidel", "jacobi"):
        raise ValueError(f"unknown mode {mode!r}")
    if costs.n != g.n:
        raise ValueError("costs length does not match graph")
    N = p.teleport_count(g.n)
    v = np.zeros(g.n)
    image = np.empty(g.n)
    dstar = np.empty(g.n, dtype=np.int64)
    sweeps = 0
    while True:
        lam = _jacobi_image(v, g, costs, p, N, threads, image, dstar)
        residual = float(np.max(np.abs(v - image)))
        if residual < p.eps:
            converged = True
            break
        if sweeps >= p.max_iters:
            converged = False
            break
        if mode == "jacobi":
            v, image = image, v
        else:
            tterm = p.alpha / (1.0 - p.alpha) * lam
            bellman_sweep_gs(g.offsets, g.targets, v, costs.costs, p.gamma,
                             p.alpha, tterm, dstar)
        sweeps += 1

    teleport_set = np.sort(np.argsort(v, kind="stable")[:N]).astype(np.int64)
    kept_graph = _extract_policy(v, dstar, g)
    chain = PolicyChain(kept_graph, teleport_set, p.alpha)
    try:
        stationary = stationary_distribution(chain)
    except ConvergenceError:
        stationary = None
        converged = False
    return MaxRankSolution(
        bias=ScoreVector(v, ScoreKind.REAL),
        lam=lam,
        kept_degree=dstar.copy(),
        kept_graph=kept_graph,
        teleport_set=teleport_set,
        stationary=stationary,
        residual=residual,
        sweeps=sweeps,
        converged=converged,
    )


def policy_certificate(sol: MaxRankSolution, g: WebGraph,
                       costs: CostAssignment, p: MaxRankParams) -> float:
    """Max defect of the extracted policy against the ergodic equation.

    Evaluates cost(x, a*) + row(x).bias - bias_x - lambda at every page;
    at a fixed point this is 0, and it stays within eps at convergence.
    """
    v = sol.bias.values
    z_dot = float(np.mean(v[sol.teleport_set]))
    deg = g.out_degrees()
    d = sol.kept_degree
    cost = costs.costs + np.where(
        deg > 0, p.gamma * (deg - d) / np.maximum(deg, 1), 0.0
    )
    per_edge_src = np.repeat(np.arange(g.n), d)
    kept_sum = np.bincount(per_edge_src, weights=v[sol.kept_graph.targets],
                           minlength=g.n)
    nu_dot = np.where(d > 0, kept_sum / np.maximum(d, 1), z_dot)
    lhs = cost + p.alpha * nu_dot + (1.0 - p.alpha) * z_dot
    return float(np.max(np.abs(lhs - v - sol.lam)))
