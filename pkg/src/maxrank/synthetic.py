"""Synthetic planted-spam-farm instances for pipeline tests.

The generator builds two disjoint communities: a spam farm whose pages all
link to a boosted target and to random accomplices, and a separate nonspam
community on a ring with random chords.  Every page is labeled; 10% of each
community goes to the Train split and the rest to Test.  No page is
dangling, so the bias oracles apply.
"""

from __future__ import annotations

import numpy as np

from .graph import CostAssignment, Label, Split, WebGraph

DEFAULT_SEED = 20240817


def planted_spam_farm(n_spam: int = 50, n_nonspam: int = 150,
                      extra_links: int = 2, train_fraction: float = 0.1,
                      cost_spam: float = 1.0, cost_nonspam: float = -0.2,
                      seed: int = DEFAULT_SEED):
    """Returns (graph, costs) for a planted farm; fixed seed, reproducible.

    Pages 0..n_spam-1 are the farm (page 0 is the boosted target), the rest
    the nonspam community.
    """
    if n_spam < 2 or n_nonspam < 2:
        raise ValueError("need at least two pages per community")
    rng = np.random.default_rng(seed)
    n = n_spam + n_nonspam
    src, dst = [], []

    # farm: everyone links to the target; target links back to a supporter;
    # extra random intra-farm links densify the cluster
    for i in range(1, n_spam):
        src.append(i)
        dst.append(0)
    for i in range(n_spam):
        for j in rng.integers(0, n_spam, size=extra_links):
            if int(j) != i:
                src.append(i)
                dst.append(int(j))
    src.append(0)
    dst.append(1 + int(rng.integers(0, n_spam - 1)))

    # nonspam community: a ring plus random chords keeps it strongly
    # connected with no dangling pages
    for k in range(n_nonspam):
        i = n_spam + k
        src.append(i)
        dst.append(n_spam + (k + 1) % n_nonspam)
        for j in rng.integers(0, n_nonspam, size=extra_links):
            if int(j) != k:
                src.append(i)
                dst.append(n_spam + int(j))

    g = WebGraph.from_edges(n, src, dst)

    labels = np.empty(n, dtype=np.int8)
    labels[:n_spam] = int(Label.SPAM)
    labels[n_spam:] = int(Label.NONSPAM)
    split = np.full(n, int(Split.TEST), dtype=np.int8)
    for lo, hi in ((0, n_spam), (n_spam, n)):
        k = max(1, int(round(train_fraction * (hi - lo))))
        train = rng.choice(np.arange(lo, hi), size=k, replace=False)
        split[train] = int(Split.TRAIN)

    costs = CostAssignment.from_labels(labels, split, cost_spam, cost_nonspam)
    return g, costs
