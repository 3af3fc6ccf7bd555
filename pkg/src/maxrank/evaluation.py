"""Precision/recall curves and demotion-ratio tables for score vectors."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .graph import CostAssignment, FormatError, Label, Split, _data_lines
from .ranking import ScoreVector


class Direction(Enum):
    HIGHER_IS_SPAM = "higher"
    LOWER_IS_SPAM = "lower"


class TableVariant(Enum):
    RAW = "raw"
    MEAN_NORMALIZED = "mean-normalized"


@dataclass(frozen=True)
class PrecisionRecallCurve:
    """One (threshold, precision, recall) row per distinct score value.

    Rows are ordered from the strictest threshold to the loosest, so recall
    is nondecreasing down the curve.
    """

    thresholds: np.ndarray
    precision: np.ndarray
    recall: np.ndarray
    direction: Direction

    def __len__(self) -> int:
        return len(self.thresholds)


@dataclass(frozen=True)
class DemotionTable:
    """Per-page candidate/pagerank ratios, ascending (most demoted first)."""

    page_ids: np.ndarray
    ratios: np.ndarray
    variant: TableVariant


def precision_recall(scores: ScoreVector, labels: CostAssignment,
                     target: Label = Label.SPAM,
                     direction: Direction = Direction.HIGHER_IS_SPAM,
                     include_train: bool = False) -> PrecisionRecallCurve:
    """Sweep every distinct score among the evaluated pages as a threshold.

    Only Test-split labeled pages are evaluated unless include_train is set.
    The retrieved side follows the direction for spam and flips for nonspam;
    pages tied at a threshold are retrieved together.
    """
    if target not in (Label.SPAM, Label.NONSPAM):
        raise ValueError("target must be spam or nonspam")
    values = scores.values
    if len(values) != labels.n:
        raise ValueError("scores and labels disagree on page count")
    eligible = np.asarray(labels.labels) != int(Label.UNKNOWN)
    if include_train:
        eligible &= np.isin(labels.split, (int(Split.TRAIN), int(Split.TEST)))
    else:
        eligible &= np.asarray(labels.split) == int(Split.TEST)
    relevant = eligible & (np.asarray(labels.labels) == int(target))
    if not relevant.any():
        raise ValueError("no evaluated page carries the target label")

    # orient so that larger oriented score always means "retrieve first"
    spam_side = (target is Label.SPAM) == (direction is Direction.HIGHER_IS_SPAM)
    oriented = values[eligible] if spam_side else -values[eligible]
    hits = relevant[eligible]

    order = np.argsort(-oriented, kind="stable")
    oriented = oriented[order]
    hits = hits[order]
    # last index of each tie group: all pages tied at a threshold together
    boundary = np.flatnonzero(np.diff(oriented) != 0)
    last = np.append(boundary, len(oriented) - 1)
    tp = np.cumsum(hits)[last]
    retrieved = last + 1
    thresholds = oriented[last] if spam_side else -oriented[last]
    return PrecisionRecallCurve(
        thresholds=thresholds.astype(np.float64),
        precision=tp / retrieved,
        recall=tp / hits.sum(),
        direction=direction,
    )


def trapezoid_auc(curve: PrecisionRecallCurve) -> float:
    """Trapezoid area under precision as a function of recall."""
    p, r = curve.precision, curve.recall
    if len(r) < 2:
        return 0.0
    return float(np.sum((r[1:] - r[:-1]) * (p[1:] + p[:-1]) / 2.0))


def demotion_table(candidate: ScoreVector, pagerank: ScoreVector,
                   variant: TableVariant = TableVariant.RAW) -> DemotionTable:
    """candidate/pagerank ratios where pagerank is positive, ascending."""
    if candidate.n != pagerank.n:
        raise ValueError("score vectors disagree on page count")
    mask = pagerank.values > 0
    if not mask.any():
        raise ValueError("all pagerank entries are zero")
    pages = np.flatnonzero(mask).astype(np.int64)
    ratios = candidate.values[mask] / pagerank.values[mask]
    if variant is TableVariant.MEAN_NORMALIZED:
        ratios = ratios / ratios.mean()
    order = np.argsort(ratios, kind="stable")
    return DemotionTable(pages[order], ratios[order], variant)


def export_curves(obj, writer) -> None:
    """Write a curve or table as CSV: 17-significant-digit floats, LF endings."""
    if isinstance(obj, PrecisionRecallCurve):
        rows = ["threshold,precision,recall\n"]
        rows += [
            f"{t:.17g},{p:.17g},{r:.17g}\n"
            for t, p, r in zip(obj.thresholds, obj.precision, obj.recall)
        ]
    elif isinstance(obj, DemotionTable):
        rows = ["page_id,ratio\n"]
        rows += [f"{i},{r:.17g}\n" for i, r in zip(obj.page_ids, obj.ratios)]
    else:
        raise TypeError("expected a PrecisionRecallCurve or DemotionTable")
    data = "".join(rows).encode("ascii")
    if isinstance(writer, (str, Path)):
        Path(writer).write_bytes(data)
    else:
        writer.write(data)


def read_curve(reader, direction: Direction = Direction.HIGHER_IS_SPAM
               ) -> PrecisionRecallCurve:
    """Re-import an exported curve CSV."""
    rows = _read_csv(reader, "threshold,precision,recall", 3)
    arr = np.array(rows, dtype=np.float64).reshape(-1, 3)
    return PrecisionRecallCurve(arr[:, 0], arr[:, 1], arr[:, 2], direction)


def read_table(reader, variant: TableVariant = TableVariant.RAW) -> DemotionTable:
    """Re-import an exported demotion-table CSV."""
    rows = _read_csv(reader, "page_id,ratio", 2)
    pages = np.array([r[0] for r in rows], dtype=np.int64)
    ratios = np.array([r[1] for r in rows], dtype=np.float64)
    return DemotionTable(pages, ratios, variant)


def _read_csv(reader, expected_header: str, width: int):
    lines = _data_lines(reader)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise FormatError("empty file, expected a CSV header") from None
    if header != expected_header:
        raise FormatError(f"expected header {expected_header!r}", lineno)
    rows = []
    for lineno, text in lines:
        parts = text.split(",")
        if len(parts) != width:
            raise FormatError(f"expected {width} comma-separated fields", lineno)
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise FormatError(f"bad number in row {text!r}", lineno) from None
    return rows
