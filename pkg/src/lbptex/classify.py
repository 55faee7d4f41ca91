"""Nearest-reference classification, confusion matrices, accuracy."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ConfigError
from .metrics import get_metric


@dataclass(frozen=True)
class ReferenceEntry:
    """One reference texture: its identifier and feature vector."""

    texture_id: str
    feature: np.ndarray


@dataclass(frozen=True)
class ReferenceSet:
    """Ordered reference features plus the metric used to compare against them.

    Feature lengths must agree unless ``ragged=True`` (used by the
    dominant-pattern variant, whose features are zero-padded pairwise at
    comparison time).
    """

    entries: tuple[ReferenceEntry, ...]
    metric: str = "od"
    ragged: bool = False

    def __post_init__(self) -> None:
        if len(self.entries) == 0:
            raise ValueError("reference set must not be empty")
        ids = [e.texture_id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate texture_id in reference set")
        if not self.ragged:
            lengths = {int(np.asarray(e.feature).size) for e in self.entries}
            if len(lengths) > 1:
                raise ValueError(f"reference features have differing lengths: {sorted(lengths)}")
        get_metric(self.metric)  # validate the identifier early

    @property
    def texture_ids(self) -> tuple[str, ...]:
        return tuple(e.texture_id for e in self.entries)


def make_reference_set(
    pairs: Iterable[tuple[str, np.ndarray]], metric: str = "od", ragged: bool = False
) -> ReferenceSet:
    entries = tuple(ReferenceEntry(tid, np.asarray(f, dtype=np.float64)) for tid, f in pairs)
    return ReferenceSet(entries=entries, metric=metric, ragged=ragged)


def _padded(metric_fn: Callable) -> Callable:
    from .histograms import pad_to_common_length

    def padded_metric(a, b):
        pa, pb = pad_to_common_length(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))
        return metric_fn(pa, pb)

    return padded_metric


def distances_to_references(test_feature, refs: ReferenceSet) -> list[float]:
    """Distance from the test feature to each reference, in entry order.

    The reference is always the first metric argument, the test sample the
    second (this matters for the directed divergence).
    """
    fn = get_metric(refs.metric)
    if refs.ragged:
        fn = _padded(fn)
    test = np.asarray(getattr(test_feature, "counts", test_feature), dtype=np.float64)
    return [float(fn(e.feature, test)) for e in refs.entries]


def nearest_reference(test_feature, refs: ReferenceSet) -> str:
    """Identifier of the closest reference; ties pick the earliest entry."""
    dists = distances_to_references(test_feature, refs)
    best = int(np.argmin(dists))
    return refs.entries[best].texture_id


@dataclass(frozen=True)
class ConfusionMatrix:
    """Square count matrix: rows are actual classes, columns predicted."""

    counts: np.ndarray
    class_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        arr = np.asarray(self.counts, dtype=np.int64)
        k = len(self.class_ids)
        if arr.shape != (k, k):
            raise ValueError(f"counts must be {k}x{k}, got {arr.shape}")
        if arr.size and int(arr.min()) < 0:
            raise ValueError("counts must be non-negative")
        object.__setattr__(self, "counts", arr)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def correct(self) -> int:
        return int(np.trace(self.counts))


def confusion_matrix(
    pairs: Iterable[tuple[str, str]], class_ids: Sequence[str]
) -> ConfusionMatrix:
    """Tally (actual, predicted) pairs over the given class ordering."""
    ids = tuple(class_ids)
    index = {tid: i for i, tid in enumerate(ids)}
    if len(index) != len(ids):
        raise ValueError("duplicate class identifiers")
    counts = np.zeros((len(ids), len(ids)), dtype=np.int64)
    for actual, predicted in pairs:
        if actual not in index:
            raise ConfigError(f"actual class {actual!r} not among {ids}")
        if predicted not in index:
            raise ConfigError(f"predicted class {predicted!r} not among {ids}")
        counts[index[actual], index[predicted]] += 1
    return ConfusionMatrix(counts=counts, class_ids=ids)


def accuracy_rate(matrix: ConfusionMatrix) -> float:
    """Percentage of correctly classified samples (trace over total)."""
    if matrix.total == 0:
        raise ValueError("confusion matrix is empty")
    return 100.0 * matrix.correct / matrix.total


def write_confusion_csv(matrix: ConfusionMatrix, path) -> None:
    """Header row/column carry the class identifiers."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["actual\\predicted", *matrix.class_ids])
        for tid, row in zip(matrix.class_ids, matrix.counts):
            writer.writerow([tid, *[int(c) for c in row]])
