"""Web graphs and per-page cost assignments.

A graph is stored in compressed adjacency form: an ``offsets`` array of
length n+1 indexing into a flat ``targets`` array, with the targets of
each page sorted ascending.  The text format accepted by :func:`load_graph`
is an edge list::

    n m
    src dst
    ...

with one header line, m edge lines, 0-indexed ids, and '#' comments.
Label files for :func:`load_costs` contain lines ``page_id label split``
with label in {spam, nonspam} and split in {train, test}; pages absent
from the file stay unlabeled with cost 0.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

import numpy as np


class FormatError(ValueError):
    """Malformed graph or label input; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class Label(IntEnum):
    UNKNOWN = 0
    SPAM = 1
    NONSPAM = 2


class Split(IntEnum):
    NONE = 0
    TRAIN = 1
    TEST = 2


@dataclass(frozen=True)
class WebGraph:
    """Immutable directed graph over pages 0..n-1 in compressed form."""

    n: int
    offsets: np.ndarray  # int64, length n+1, nondecreasing
    targets: np.ndarray  # int64, sorted strictly increasing per source

    def __post_init__(self):
        offsets = np.ascontiguousarray(self.offsets, dtype=np.int64)
        targets = np.ascontiguousarray(self.targets, dtype=np.int64)
        if self.n < 0:
            raise ValueError("page count must be nonnegative")
        if offsets.shape != (self.n + 1,):
            raise ValueError("offsets must have length n+1")
        if offsets[0] != 0 or offsets[-1] != len(targets):
            raise ValueError("offsets must start at 0 and end at len(targets)")
        if np.any(np.diff(offsets) < 0):
            raise ValueError("offsets must be nondecreasing")
        if len(targets) and (targets.min() < 0 or targets.max() >= self.n):
            raise ValueError("target id out of range")
        # strictly increasing inside each source slice
        if len(targets) > 1:
            inner = np.diff(targets) <= 0
            bounds = offsets[1:-1]  # slice boundaries may go down
            bounds = bounds[(bounds > 0) & (bounds < len(targets))]
            inner[bounds - 1] = False
            if inner.any():
                raise ValueError("targets must be strictly increasing per source")
        offsets.flags.writeable = False
        targets.flags.writeable = False
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "targets", targets)

    @property
    def m(self) -> int:
        """Number of edges."""
        return len(self.targets)

    def out_degree(self, i: int) -> int:
        return int(self.offsets[i + 1] - self.offsets[i])

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def out_neighbors(self, i: int) -> np.ndarray:
        return self.targets[self.offsets[i] : self.offsets[i + 1]]

    def __eq__(self, other) -> bool:
        if not isinstance(other, WebGraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.targets, other.targets)
        )

    @classmethod
    def from_edges(cls, n: int, src, dst) -> "WebGraph":
        """Build a graph from parallel src/dst arrays, deduplicating edges."""
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if len(src):
            order = np.lexsort((dst, src))
            src, dst = src[order], dst[order]
            keep = np.empty(len(src), dtype=bool)
            keep[0] = True
            keep[1:] = (src[1:] != src[:-1]) | (dst[1:] != dst[:-1])
            src, dst = src[keep], dst[keep]
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
        return cls(n, offsets, dst)


def reverse_graph(g: WebGraph) -> WebGraph:
    """Graph with every edge flipped; an involution preserving edge count."""
    deg_in = np.bincount(g.targets, minlength=g.n)
    offsets = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(deg_in, out=offsets[1:])
    # stable sort by target keeps sources ascending inside each new slice
    order = np.argsort(g.targets, kind="stable")
    sources = np.repeat(np.arange(g.n, dtype=np.int64), g.out_degrees())
    return WebGraph(g.n, offsets, sources[order])


@dataclass(frozen=True)
class CostAssignment:
    """Per-page a-priori costs plus spam labels and the train/test split."""

    costs: np.ndarray  # float64
    labels: np.ndarray  # int8 of Label
    split: np.ndarray  # int8 of Split

    def __post_init__(self):
        costs = np.ascontiguousarray(self.costs, dtype=np.float64)
        labels = np.ascontiguousarray(self.labels, dtype=np.int8)
        split = np.ascontiguousarray(self.split, dtype=np.int8)
        if not (len(costs) == len(labels) == len(split)):
            raise ValueError("costs, labels and split must share one length")
        if not np.all(np.isfinite(costs)):
            raise ValueError("costs must be finite")
        for arr in (costs, labels, split):
            arr.flags.writeable = False
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "split", split)

    @property
    def n(self) -> int:
        return len(self.costs)

    def pages_with(self, label: Label, split: Split | None = None) -> np.ndarray:
        """Ids of pages carrying the given label (and split, if given)."""
        mask = self.labels == int(label)
        if split is not None:
            mask &= self.split == int(split)
        return np.flatnonzero(mask)

    @classmethod
    def zeros(cls, n: int) -> "CostAssignment":
        return cls(
            np.zeros(n),
            np.full(n, int(Label.UNKNOWN), dtype=np.int8),
            np.full(n, int(Split.NONE), dtype=np.int8),
        )

    @classmethod
    def from_labels(
        cls,
        labels: np.ndarray,
        split: np.ndarray,
        cost_spam: float = 1.0,
        cost_nonspam: float = -0.2,
    ) -> "CostAssignment":
        """Apply the default cost mapping: training seeds get a-priori costs."""
        labels = np.asarray(labels, dtype=np.int8)
        split = np.asarray(split, dtype=np.int8)
        costs = np.zeros(len(labels))
        train = split == int(Split.TRAIN)
        costs[train & (labels == int(Label.SPAM))] = cost_spam
        costs[train & (labels == int(Label.NONSPAM))] = cost_nonspam
        return cls(costs, labels, split)


def _data_lines(reader):
    """Yield (line_number, stripped_text) skipping blanks and '#' comments."""
    if isinstance(reader, (str, Path)):
        reader = open(reader, "rb")
    with reader if hasattr(reader, "close") else io.BytesIO(reader) as fh:
        for lineno, raw in enumerate(fh, start=1):
            if isinstance(raw, bytes):
                try:
                    raw = raw.decode("ascii")
                except UnicodeDecodeError as exc:
                    raise FormatError(f"non-ascii byte: {exc}", lineno)
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            yield lineno, text


def _parse_int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise FormatError(f"expected integer, got {token!r}", lineno) from None


def load_graph(reader) -> WebGraph:
    """Parse the edge-list format into a validated :class:`WebGraph`.

    Parallel edges are deduplicated; self-loops are kept.  ``reader`` may be
    a path or a binary stream.
    """
    lines = _data_lines(reader)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise FormatError("empty input, expected 'n m' header") from None
    tokens = header.split()
    if len(tokens) != 2:
        raise FormatError(f"header must be 'n m', got {header!r}", lineno)
    n = _parse_int(tokens[0], lineno)
    m = _parse_int(tokens[1], lineno)
    if n < 0 or m < 0:
        raise FormatError("header counts must be nonnegative", lineno)

    src = np.empty(m, dtype=np.int64)
    dst = np.empty(m, dtype=np.int64)
    count = 0
    last_line = lineno
    for lineno, text in lines:
        if count >= m:
            raise FormatError(
                f"unexpected extra edge line after {m} edges", lineno
            )
        tokens = text.split()
        if len(tokens) != 2:
            raise FormatError(f"edge line must be 'src dst', got {text!r}", lineno)
        s = _parse_int(tokens[0], lineno)
        d = _parse_int(tokens[1], lineno)
        for node in (s, d):
            if not 0 <= node < n:
                raise FormatError(f"node id {node} out of range [0,{n})", lineno)
        src[count] = s
        dst[count] = d
        count += 1
        last_line = lineno
    if count != m:
        raise FormatError(
            f"truncated stream: expected {m} edges, got {count}", last_line
        )
    return WebGraph.from_edges(n, src, dst)


_LABEL_TOKENS = {"spam": Label.SPAM, "nonspam": Label.NONSPAM}
_SPLIT_TOKENS = {"train": Split.TRAIN, "test": Split.TEST}


def load_costs(
    reader, n: int, cost_spam: float = 1.0, cost_nonspam: float = -0.2
) -> CostAssignment:
    """Parse a label file and apply the default cost mapping.

    Duplicate page ids are an error: silently overwriting a seed label would
    corrupt the seed sets.
    """
    labels = np.full(n, int(Label.UNKNOWN), dtype=np.int8)
    split = np.full(n, int(Split.NONE), dtype=np.int8)
    seen = np.zeros(n, dtype=bool)
    for lineno, text in _data_lines(reader):
        tokens = text.split()
        if len(tokens) != 3:
            raise FormatError(
                f"label line must be 'page_id label split', got {text!r}", lineno
            )
        page = _parse_int(tokens[0], lineno)
        if not 0 <= page < n:
            raise FormatError(f"page id {page} out of range [0,{n})", lineno)
        if seen[page]:
            raise FormatError(f"duplicate label for page {page}", lineno)
        seen[page] = True
        try:
            labels[page] = int(_LABEL_TOKENS[tokens[1]])
        except KeyError:
            raise FormatError(f"unknown label {tokens[1]!r}", lineno) from None
        try:
            split[page] = int(_SPLIT_TOKENS[tokens[2]])
        except KeyError:
            raise FormatError(f"unknown split {tokens[2]!r}", lineno) from None
    return CostAssignment.from_labels(labels, split, cost_spam, cost_nonspam)
