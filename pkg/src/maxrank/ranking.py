"""PageRank, TrustRank and AntiTrustRank by sparse power iteration.

The damped chain is P = alpha*S + (1-alpha)*e*z with dangling rows of S
replaced by the teleportation vector z.  Iteration never materializes P:
each sweep pushes link mass with the link_sweep kernel and routes the
dangling mass to z.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .graph import FormatError, WebGraph, reverse_graph
from .kernels import link_sweep


class ScoreKind(Enum):
    DISTRIBUTION = "distribution"
    REAL = "real"


@dataclass(frozen=True)
class ScoreVector:
    """Length-n scores: a probability distribution or unconstrained reals."""

    values: np.ndarray
    kind: ScoreKind

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(values)):
            raise ValueError("scores must be finite")
        if self.kind is ScoreKind.DISTRIBUTION:
            if len(values) == 0:
                raise ValueError("a distribution needs at least one entry")
            if values.min() < 0:
                raise ValueError("distribution entries must be nonnegative")
            if abs(float(values.sum()) - 1.0) > 1e-9:
                raise ValueError("distribution must sum to 1 within 1e-9")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScoreVector):
            return NotImplemented
        return self.kind is other.kind and np.array_equal(self.values, other.values)


@dataclass(frozen=True)
class TeleportVector:
    """Uniform distribution over a nonempty support set of pages."""

    n: int
    support: np.ndarray  # int64, sorted unique page ids

    def __post_init__(self):
        support = np.unique(np.asarray(self.support, dtype=np.int64))
        if len(support) == 0:
            raise ValueError("teleportation support must be nonempty")
        if support[0] < 0 or support[-1] >= self.n:
            raise ValueError("teleportation support id out of range")
        support.flags.writeable = False
        object.__setattr__(self, "support", support)

    @property
    def weight(self) -> float:
        return 1.0 / len(self.support)

    def dense(self) -> np.ndarray:
        z = np.zeros(self.n)
        z[self.support] = self.weight
        return z

    @classmethod
    def uniform(cls, n: int) -> "TeleportVector":
        return cls(n, np.arange(n, dtype=np.int64))


class ConvergenceError(RuntimeError):
    """Iteration budget exhausted; carries the last iterate for inspection."""

    def __init__(self, message: str, values: np.ndarray, residual: float, sweeps: int):
        super().__init__(f"{message} (residual {residual:.3e} after {sweeps} sweeps)")
        self.values = values
        self.residual = residual
        self.sweeps = sweeps


def _power_iteration(g: WebGraph, z: TeleportVector, alpha: float, eps: float,
                     max_iters: int):
    """Run the damped power iteration; returns (pi, residual, sweeps).

    Stops when successive iterates differ by at most eps in l1 norm, which
    bounds the stationarity defect by alpha*eps.
    """
    if not 0 <= alpha < 1:
        raise ValueError("alpha must be in [0, 1)")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    if z.n != g.n:
        raise ValueError("teleportation vector has wrong length")
    pi = z.dense()
    out = np.empty(g.n)
    for sweep in range(1, max_iters + 1):
        dangling = link_sweep(g.offsets, g.targets, pi, out)
        new = alpha * out
        new[z.support] += (alpha * dangling + (1.0 - alpha)) * z.weight
        residual = float(np.sum(np.abs(new - pi)))
        pi = new
        if residual <= eps:
            return pi, residual, sweep
    raise ConvergenceError("power iteration did not converge", pi, residual,
                           max_iters)


def pagerank(g: WebGraph, z: TeleportVector | None = None, alpha: float = 0.85,
             eps: float = 1e-10, max_iters: int = 200) -> ScoreVector:
    """Stationary distribution of the damped surfer chain."""
    if z is None:
        z = TeleportVector.uniform(g.n)
    pi, _, _ = _power_iteration(g, z, alpha, eps, max_iters)
    return ScoreVector(pi, ScoreKind.DISTRIBUTION)


def trustrank(g: WebGraph, trusted, alpha: float = 0.85, eps: float = 1e-10,
              max_iters: int = 200) -> ScoreVector:
    """PageRank with teleportation restricted to a trusted seed."""
    return pagerank(g, TeleportVector(g.n, trusted), alpha, eps, max_iters)


def antitrustrank(g: WebGraph, spam, alpha: float = 0.85, eps: float = 1e-10,
                  max_iters: int = 200) -> ScoreVector:
    """TrustRank on the reversed graph, seeded with known spam."""
    return trustrank(reverse_graph(g), spam, alpha, eps, max_iters)


def write_scores(values, writer) -> None:
    """Write lines "page_id score" with 17 significant digits, LF endings."""
    if isinstance(values, ScoreVector):
        values = values.values
    lines = [f"{i} {float(x):.17g}\n" for i, x in enumerate(values)]
    data = "".join(lines).encode("ascii")
    if isinstance(writer, (str, Path)):
        Path(writer).write_bytes(data)
    else:
        writer.write(data)


def read_scores(reader) -> np.ndarray:
    """Parse a score file back; page ids must be 0..n-1 in order."""
    from .graph import _data_lines

    out = []
    for lineno, text in _data_lines(reader):
        tokens = text.split()
        if len(tokens) != 2:
            raise FormatError(f"score line must be 'page_id score', got {text!r}",
                              lineno)
        try:
            page = int(tokens[0])
            value = float(tokens[1])
        except ValueError:
            raise FormatError(f"bad score line {text!r}", lineno) from None
        if page != len(out):
            raise FormatError(f"expected page id {len(out)}, got {page}", lineno)
        out.append(value)
    return np.array(out, dtype=np.float64)
