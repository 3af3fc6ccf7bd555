"""Shared test utilities: random instances and dense reference solves."""

from __future__ import annotations

import numpy as np

from maxrank.graph import CostAssignment, Label, Split, WebGraph


def random_web_graph(rng, n, max_out=4, allow_dangling=True):
    """Random graph with per-page out-degree in [0, max_out] (or [1, max_out])."""
    src = []
    dst = []
    lo = 0 if allow_dangling else 1
    for i in range(n):
        d = int(rng.integers(lo, max_out + 1))
        d = min(d, n)
        if d == 0:
            continue
        targets = rng.choice(n, size=d, replace=False)
        src.extend([i] * d)
        dst.extend(int(t) for t in targets)
    return WebGraph.from_edges(n, np.asarray(src, dtype=np.int64),
                               np.asarray(dst, dtype=np.int64))


def random_costs(rng, n, train_fraction=0.5):
    """Random labeled costs: every page labeled, train/test split at random."""
    labels = rng.choice([int(Label.SPAM), int(Label.NONSPAM)], size=n)
    split = np.where(rng.random(n) < train_fraction,
                     int(Split.TRAIN), int(Split.TEST))
    return CostAssignment.from_labels(
        labels.astype(np.int8), split.astype(np.int8),
        cost_spam=1.0, cost_nonspam=-0.2)


def transition_matrix(g, z_dense, alpha):
    """Dense P = alpha*S + rows of (1-alpha)*z, dangling rows replaced by z."""
    n = g.n
    s = np.zeros((n, n))
    for i in range(n):
        nbrs = g.out_neighbors(i)
        if nbrs.size:
            s[i, nbrs] = 1.0 / nbrs.size
        else:
            s[i] = z_dense
    return alpha * s + (1.0 - alpha) * np.outer(np.ones(n), z_dense)


def dense_stationary(p):
    """Stationary row vector of a dense stochastic matrix, replace-one solve."""
    n = p.shape[0]
    a = p.T - np.eye(n)
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    pi = np.linalg.solve(a, b)
    return pi


def dense_pagerank(g, z_dense, alpha):
    return dense_stationary(transition_matrix(g, z_dense, alpha))
