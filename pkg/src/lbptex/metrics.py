"""Dissimilarity measures between histograms.

Both metrics accept raw count vectors, normalized vectors, or
:class:`~lbptex.histograms.Histogram` objects and normalize internally.
``kl_divergence(a, b)`` is directed: ``a`` is the reference model and ``b``
the observed sample, with the log ratio weighted by ``b``.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError

#: Additive smoothing applied to both vectors before the KL log ratio.
KL_EPSILON = 1e-10


def _as_prob(v) -> np.ndarray:
    arr = np.asarray(getattr(v, "counts", v), dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("vector must not be empty")
    if float(arr.min()) < 0:
        raise ValueError("vector entries must be non-negative")
    total = float(arr.sum())
    if total <= 0:
        raise ValueError("vector must have positive mass")
    return arr / total


def _check_same_length(a: np.ndarray, b: np.ndarray) -> None:
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")


def kl_divergence(a, b) -> float:
    """Directed divergence of sample ``b`` from reference ``a``.

    Both probability vectors receive additive smoothing ``KL_EPSILON`` and
    are renormalized, then ``sum(q * ln(q / p))`` is taken with ``q`` from
    ``b`` and ``p`` from ``a``.  Zero exactly when the inputs are identical.
    """
    p = _as_prob(a)
    q = _as_prob(b)
    _check_same_length(p, q)
    p = p + KL_EPSILON
    p = p / p.sum()
    q = q + KL_EPSILON
    q = q / q.sum()
    return float(np.sum(q * np.log(q / p)))


def ordinal_distance(a, b) -> float:
    """Sum of absolute differences between cumulative histograms.

    Equals the minimal cost of turning one normalized histogram into the
    other when moving one unit of mass across adjacent bins costs one.
    """
    p = _as_prob(a)
    q = _as_prob(b)
    _check_same_length(p, q)
    return float(np.sum(np.abs(np.cumsum(p - q))))


METRICS = {
    "od": ordinal_distance,
    "kl": kl_divergence,
}


def get_metric(name: str):
    """Look up a metric by its identifier (``od`` or ``kl``)."""
    try:
        return METRICS[name]
    except KeyError:
        raise ConfigError(f"unknown metric {name!r}; expected one of {sorted(METRICS)}") from None
