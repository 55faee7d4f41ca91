"""Histograms over label maps, contrast quantization, and combined features.

A :class:`Histogram` holds raw integer counts for plain descriptors; the
combination helpers (``concat_histogram``) produce normalized float
histograms, since their halves are rescaled to comparable mass.  Distance
functions normalize internally, so both kinds flow through classification
unchanged.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .descriptors import LabelMap
from .errors import DataError, DegenerateDataError


@dataclass(frozen=True)
class Histogram:
    """1-D histogram: ``counts[i]`` is the mass of bin ``i``."""

    counts: np.ndarray
    variant: str = ""

    def __post_init__(self) -> None:
        arr = np.asarray(self.counts)
        if arr.ndim != 1:
            raise ValueError("counts must be 1-D")
        if arr.size > 0 and float(arr.min()) < 0:
            raise ValueError("counts must be non-negative")
        object.__setattr__(self, "counts", arr)

    @property
    def bins(self) -> int:
        return int(self.counts.size)

    @property
    def total(self):
        """Sum of all bin masses (int for count histograms)."""
        s = self.counts.sum()
        if np.issubdtype(self.counts.dtype, np.integer):
            return int(s)
        return float(s)

    def normalized(self) -> np.ndarray:
        """Probability view; requires positive total mass."""
        total = float(self.counts.sum())
        if total <= 0:
            raise DataError(f"cannot normalize a histogram with total {total}")
        return self.counts.astype(np.float64) / total

    def to_json_dict(self) -> dict:
        if np.issubdtype(self.counts.dtype, np.integer):
            counts = [int(c) for c in self.counts]
        else:
            counts = [float(c) for c in self.counts]
        return {
            "variant": self.variant,
            "bins": self.bins,
            "counts": counts,
            "total": self.total,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Histogram":
        counts = np.asarray(obj["counts"])
        h = cls(counts=counts, variant=str(obj.get("variant", "")))
        if "bins" in obj and int(obj["bins"]) != h.bins:
            raise DataError(f"bins field {obj['bins']} does not match {h.bins} counts")
        return h


def build_histogram(label_map: LabelMap) -> Histogram:
    """Count each label over the map; bins cover the full label space."""
    labels = label_map.labels.ravel()
    if labels.size == 0:
        raise DataError("label map is empty")
    lo = int(labels.min())
    hi = int(labels.max())
    if lo < 0 or hi >= label_map.label_space:
        raise DataError(
            f"label {lo if lo < 0 else hi} outside [0, {label_map.label_space}) "
            f"for variant {label_map.variant!r}"
        )
    counts = np.bincount(labels, minlength=label_map.label_space).astype(np.int64)
    return Histogram(counts=counts, variant=label_map.variant)


# ---------------------------------------------------------------------------
# Contrast quantization


@dataclass(frozen=True)
class CIQuantizer:
    """Scalar quantizer defined by strictly ascending bin edges."""

    edges: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.edges, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("edges must be a non-empty 1-D array")
        if np.any(np.diff(arr) <= 0):
            raise ValueError("edges must be strictly ascending")
        object.__setattr__(self, "edges", arr)

    @property
    def n_bins(self) -> int:
        return int(self.edges.size) + 1

    def quantize(self, values: np.ndarray) -> np.ndarray:
        """Bin index for each value; a value equal to an edge goes right."""
        return np.searchsorted(self.edges, np.asarray(values, dtype=np.float64), side="right").astype(
            np.int32
        )


def fit_ci_quantizer(values, n_bins: int) -> CIQuantizer:
    """Equal-population quantizer for the observed contrast values.

    Split points target ``k * n / n_bins`` in the sorted sample, shifted to
    the nearest position where adjacent values differ so edges are strictly
    ascending.  Requires at least ``n_bins`` distinct values.
    """
    if n_bins < 2:
        raise ValueError(f"n_bins must be at least 2, got {n_bins}")
    v = np.sort(np.asarray(values, dtype=np.float64).ravel())
    n = v.size
    if n < n_bins:
        raise DegenerateDataError(f"need at least {n_bins} values, got {n}")
    distinct = int(np.unique(v).size)
    if distinct < n_bins:
        raise DegenerateDataError(f"need at least {n_bins} distinct values, got {distinct}")

    valid = np.flatnonzero(v[:-1] < v[1:]) + 1  # positions i with v[i-1] < v[i]
    edges = []
    prev = 0
    for k in range(1, n_bins):
        target = round(k * n / n_bins)
        usable = valid[valid > prev]
        if usable.size == 0:
            raise DegenerateDataError("not enough distinct split points for the requested bins")
        m = int(usable[np.argmin(np.abs(usable - target))])
        edges.append((v[m - 1] + v[m]) / 2.0)
        prev = m
    return CIQuantizer(edges=np.asarray(edges))


def joint_histogram(label_map: LabelMap, ci_bins: np.ndarray, n_ci: int) -> Histogram:
    """Joint distribution of labels and quantized contrast bins.

    Bin ``(label, ci)`` maps to index ``label * n_ci + ci``; the marginal
    over contrast therefore reproduces the plain label histogram exactly.
    """
    bins = np.asarray(ci_bins)
    if bins.shape != label_map.labels.shape:
        raise ValueError(
            f"contrast grid shape {bins.shape} does not match label map {label_map.labels.shape}"
        )
    if bins.size == 0:
        raise DataError("contrast grid is empty")
    if int(bins.min()) < 0 or int(bins.max()) >= n_ci:
        raise DataError(f"contrast bin outside [0, {n_ci})")
    labels = label_map.labels.ravel().astype(np.int64)
    if int(labels.min()) < 0 or int(labels.max()) >= label_map.label_space:
        raise DataError(f"label outside [0, {label_map.label_space})")
    idx = labels * n_ci + bins.ravel().astype(np.int64)
    counts = np.bincount(idx, minlength=label_map.label_space * n_ci).astype(np.int64)
    return Histogram(counts=counts, variant=f"{label_map.variant}*ci{n_ci}")


def concat_histogram(h1: Histogram, h2: Histogram) -> Histogram:
    """Concatenate two histograms with equal mass per half.

    Each input is normalized independently, the halves are concatenated,
    and the result is rescaled to sum to 1 (each half carries mass 1/2).
    An empty second histogram leaves the first unchanged.
    """
    if h2.bins == 0:
        return h1
    if h1.bins == 0:
        return h2
    joined = np.concatenate([h1.normalized(), h2.normalized()]) / 2.0
    return Histogram(counts=joined, variant=f"{h1.variant}+{h2.variant}")


# ---------------------------------------------------------------------------
# Dominant-pattern reduction


@dataclass(frozen=True)
class DominantFeature:
    """Descending pattern frequencies covering a target share of the mass."""

    frequencies: np.ndarray
    coverage: float


def dominant_patterns(hist: Histogram, coverage: float = 0.8) -> DominantFeature:
    """Smallest descending-frequency prefix whose mass reaches ``coverage``.

    With ``coverage = 1.0`` every non-empty bin is retained.  Pattern
    identities are discarded; only the sorted frequencies remain.
    """
    if not 0.0 < coverage <= 1.0:
        raise ValueError(f"coverage must be in (0, 1], got {coverage}")
    freqs = np.sort(hist.normalized())[::-1]
    cum = np.cumsum(freqs)
    idx = int(np.searchsorted(cum, coverage - 1e-12))
    idx = min(idx, freqs.size - 1)
    retained = freqs[: idx + 1].copy()
    return DominantFeature(frequencies=retained, coverage=float(retained.sum()))


def pad_to_common_length(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Zero-pad the shorter vector so both have equal length."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = max(a.size, b.size)
    if a.size < n:
        a = np.concatenate([a, np.zeros(n - a.size)])
    if b.size < n:
        b = np.concatenate([b, np.zeros(n - b.size)])
    return a, b


# ---------------------------------------------------------------------------
# Serialization


def write_histogram_json(hist: Histogram, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(hist.to_json_dict(), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def read_histogram_json(path) -> Histogram:
    with open(path, "r", encoding="utf-8") as fh:
        return Histogram.from_json_dict(json.load(fh))


def write_histogram_csv(hist: Histogram, path) -> None:
    """One row per bin: ``bin,count``."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin", "count"])
        for i, c in enumerate(hist.counts):
            writer.writerow([i, int(c) if np.issubdtype(hist.counts.dtype, np.integer) else float(c)])
