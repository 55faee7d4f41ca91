"""Local binary pattern descriptors and their variants.

Two layers live here.  The scalar operators (``lbp_code``, ``ror_min``,
``uniformity``, ...) define each descriptor on a single neighborhood and
serve as the readable reference semantics.  ``compute_label_map`` applies a
descriptor to every interior pixel of an image through one of the two
engines (compiled or numpy), producing dense integer label maps ready for
histogramming.

Variant identifiers
-------------------
``classic``     3x3 sign codes (p=8, r=1, nearest sampling)
``circ``        sign codes on an interpolated circular ring
``min``         rotation-minimized codes, nearest sampling
``min_interp``  rotation-minimized codes, bilinear sampling
``uni``         uniform patterns: popcount label, non-uniform collapsed
``num``         uniform popcount labels plus grouped non-uniform labels
``ni``          sign codes thresholded at the neighbor mean
``med``         count of neighbors >= neighborhood median
``cen``         symmetric-difference codes with a central bit
``ltp``         ternary codes split into upper/lower binary maps
``clbp``        sign / magnitude / center component triple
``dom``         raw sign codes; dominant-pattern reduction happens on the
                histogram at comparison time
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from ._backend import backend as _default_backend
from ._backend import load_backend
from ._sampling import build_plan, quantize_sample
from .imagecore import GrayImage, NeighborhoodSpec

VARIANTS = (
    "classic",
    "circ",
    "min",
    "min_interp",
    "uni",
    "num",
    "ni",
    "med",
    "cen",
    "ltp",
    "clbp",
    "dom",
)

#: Variants whose label space is derived from a full 2**p code table.
_TABLE_VARIANTS = ("min", "min_interp", "uni", "num")
_MAX_TABLE_P = 20


# ---------------------------------------------------------------------------
# Scalar operators


def _check_code(code: int, p: int) -> None:
    if not 0 <= code < (1 << p):
        raise ValueError(f"code {code} out of range for p={p}")


def lbp_code(center: float, neighbors: Sequence[float]) -> int:
    """Binary sign code: bit k is set where ``neighbors[k] >= center``."""
    if len(neighbors) == 0:
        raise ValueError("neighbors must not be empty")
    code = 0
    for k, v in enumerate(neighbors):
        if v >= center:
            code |= 1 << k
    return code


def rotate_code(code: int, i: int, p: int) -> int:
    """Circular right shift of a p-bit code by i positions."""
    _check_code(code, p)
    i %= p
    mask = (1 << p) - 1
    return ((code >> i) | (code << (p - i))) & mask


def ror_min(code: int, p: int) -> int:
    """Smallest value reachable by circular bit rotations of the code."""
    _check_code(code, p)
    return min(rotate_code(code, i, p) for i in range(p))


def uniformity(code: int, p: int) -> int:
    """Number of 0/1 transitions when the code is read circularly."""
    _check_code(code, p)
    flips = code ^ rotate_code(code, 1, p)
    return bin(flips).count("1")


def uniform_label(code: int, p: int) -> int:
    """Popcount for uniform codes (at most two transitions), else ``p + 1``."""
    _check_code(code, p)
    if uniformity(code, p) <= 2:
        return bin(code).count("1")
    return p + 1


def num_label_space(p: int) -> int:
    """Number of distinct labels produced by ``num_label`` for even p >= 4."""
    ceil_half = (p + 1) // 2
    return (p + 1) + (p - 2 - ceil_half + 1)


def num_label(code: int, p: int) -> int:
    """Uniform popcount labels, with non-uniform codes grouped by majority bit count.

    Non-uniform codes share a label when they have the same
    ``max(ones, zeros)``; those labels follow the ``p + 1`` uniform ones.
    """
    _check_code(code, p)
    ones = bin(code).count("1")
    if uniformity(code, p) <= 2:
        return ones
    ceil_half = (p + 1) // 2
    return (p + 1) + (max(ones, p - ones) - ceil_half)


def ni_code(neighbors: Sequence[float]) -> int:
    """Sign code thresholded at the mean of the neighbor values."""
    p = len(neighbors)
    if p == 0:
        raise ValueError("neighbors must not be empty")
    acc = float(neighbors[0])
    for v in neighbors[1:]:
        acc = acc + float(v)
    mu = acc / p
    code = 0
    for k, v in enumerate(neighbors):
        if v >= mu:
            code |= 1 << k
    return code


def med_label(center: float, neighbors: Sequence[float]) -> int:
    """Count of neighbors >= the median of the ``p + 1`` neighborhood values."""
    p = len(neighbors)
    if p == 0 or p % 2 != 0:
        raise ValueError(f"neighbor count must be even and positive, got {p}")
    vals = sorted([float(center)] + [float(v) for v in neighbors])
    med = vals[len(vals) // 2]
    return sum(1 for v in neighbors if v >= med)


def cen_code(center: float, neighbors: Sequence[float], c: float) -> int:
    """Symmetric-difference code with a central deviation bit.

    Bit k (k < p/2) is set where ``|neighbors[k] - neighbors[k + p/2]| >= c``;
    bit p/2 is set where the center deviates from the mean of all ``p + 1``
    values by at least ``c``.
    """
    p = len(neighbors)
    if p == 0 or p % 2 != 0:
        raise ValueError(f"neighbor count must be even and positive, got {p}")
    if c < 0:
        raise ValueError(f"threshold c must be non-negative, got {c}")
    half = p // 2
    code = 0
    for k in range(half):
        if abs(float(neighbors[k]) - float(neighbors[k + half])) >= c:
            code |= 1 << k
    acc = float(center)
    for v in neighbors:
        acc = acc + float(v)
    gtot = acc / (p + 1)
    if abs(float(center) - gtot) >= c:
        code |= 1 << half
    return code


class TernaryCode(NamedTuple):
    """Ternary comparison outcome split into two disjoint binary codes."""

    trits: tuple[int, ...]
    upper: int
    lower: int


def ltp_codes(center: float, neighbors: Sequence[float], t: float) -> TernaryCode:
    """Three-way comparison with a dead zone of half-width t around the center.

    Trit k is +1 where ``neighbors[k] - center > t``, -1 where it is below
    ``-t``, else 0.  ``upper`` packs the +1 positions, ``lower`` the -1
    positions; the two never share a set bit.
    """
    if len(neighbors) == 0:
        raise ValueError("neighbors must not be empty")
    if t < 0:
        raise ValueError(f"threshold t must be non-negative, got {t}")
    trits = []
    upper = 0
    lower = 0
    for k, v in enumerate(neighbors):
        d = float(v) - float(center)
        if d > t:
            trits.append(1)
            upper |= 1 << k
        elif d < -t:
            trits.append(-1)
            lower |= 1 << k
        else:
            trits.append(0)
    return TernaryCode(tuple(trits), upper, lower)


def clbp_components(
    center: float, neighbors: Sequence[float], mag_threshold: float, center_threshold: float
) -> tuple[int, int, int]:
    """Sign code, magnitude code, and center bit of the component decomposition.

    The sign code thresholds the differences at zero, the magnitude code
    thresholds their absolute values at ``mag_threshold``, and the center
    bit compares the center intensity against ``center_threshold``.
    """
    if len(neighbors) == 0:
        raise ValueError("neighbors must not be empty")
    s_code = 0
    m_code = 0
    for k, v in enumerate(neighbors):
        d = float(v) - float(center)
        if d >= 0.0:
            s_code |= 1 << k
        if abs(d) >= mag_threshold:
            m_code |= 1 << k
    c_bit = 1 if float(center) >= center_threshold else 0
    return s_code, m_code, c_bit


def contrast_ci(center: float, neighbors: Sequence[float]) -> float:
    """Contrast: sum of neighbors >= center minus sum of neighbors below."""
    if len(neighbors) == 0:
        raise ValueError("neighbors must not be empty")
    ge = 0.0
    lt = 0.0
    for v in neighbors:
        fv = float(v)
        if fv >= float(center):
            ge = ge + fv
        else:
            lt = lt + fv
    return ge - lt


# ---------------------------------------------------------------------------
# Label tables (whole code space -> dense labels)


def _check_table_p(p: int) -> None:
    if p > _MAX_TABLE_P:
        raise ValueError(f"table-based variants support p <= {_MAX_TABLE_P}, got {p}")


def _popcounts(codes: np.ndarray, p: int) -> np.ndarray:
    out = np.zeros(codes.shape, dtype=np.int32)
    for k in range(p):
        out += ((codes >> k) & 1).astype(np.int32)
    return out


@lru_cache(maxsize=None)
def min_code_table(p: int) -> tuple[np.ndarray, int]:
    """Dense labels for rotation-minimized codes.

    Returns ``(table, count)`` where ``table[code]`` is the index of the
    code's minimal rotation among all distinct minimal values in ascending
    order.
    """
    _check_table_p(p)
    codes = np.arange(1 << p, dtype=np.int64)
    mask = (1 << p) - 1
    best = codes.copy()
    for i in range(1, p):
        rot = ((codes >> i) | (codes << (p - i))) & mask
        np.minimum(best, rot, out=best)
    uniq = np.unique(best)
    table = np.searchsorted(uniq, best).astype(np.int32)
    table.flags.writeable = False
    return table, len(uniq)


@lru_cache(maxsize=None)
def uniform_label_table(p: int) -> np.ndarray:
    """``uniform_label`` evaluated for every p-bit code."""
    _check_table_p(p)
    codes = np.arange(1 << p, dtype=np.int64)
    mask = (1 << p) - 1
    rot1 = ((codes >> 1) | (codes << (p - 1))) & mask
    transitions = _popcounts(codes ^ rot1, p)
    ones = _popcounts(codes, p)
    table = np.where(transitions <= 2, ones, p + 1).astype(np.int32)
    table.flags.writeable = False
    return table


@lru_cache(maxsize=None)
def num_label_table(p: int) -> np.ndarray:
    """``num_label`` evaluated for every p-bit code."""
    _check_table_p(p)
    codes = np.arange(1 << p, dtype=np.int64)
    mask = (1 << p) - 1
    rot1 = ((codes >> 1) | (codes << (p - 1))) & mask
    transitions = _popcounts(codes ^ rot1, p)
    ones = _popcounts(codes, p)
    ceil_half = (p + 1) // 2
    grouped = (p + 1) + (np.maximum(ones, p - ones) - ceil_half)
    table = np.where(transitions <= 2, ones, grouped).astype(np.int32)
    table.flags.writeable = False
    return table


def min_label_count(p: int) -> int:
    """Number of distinct rotation-minimized codes for p bits."""
    return min_code_table(p)[1]


# ---------------------------------------------------------------------------
# Variant parameters and label maps


@dataclass(frozen=True)
class VariantParams:
    """A descriptor variant together with its neighborhood and thresholds."""

    variant: str
    spec: NeighborhoodSpec = field(default_factory=NeighborhoodSpec)
    t: float = 1.0  # dead-zone half-width for ltp
    c: float = 3.0  # contrast threshold for cen

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.t < 0:
            raise ValueError(f"t must be non-negative, got {self.t}")
        if self.c < 0:
            raise ValueError(f"c must be non-negative, got {self.c}")
        if self.variant == "classic" and (self.spec.p != 8 or self.spec.r != 1):
            raise ValueError("variant 'classic' is defined only for p=8, r=1")
        if self.variant in _TABLE_VARIANTS:
            _check_table_p(self.spec.p)

    @property
    def effective_spec(self) -> NeighborhoodSpec:
        """Neighborhood actually sampled; some variants pin the mode."""
        if self.variant in ("classic", "min"):
            return NeighborhoodSpec(self.spec.p, self.spec.r, "nearest")
        if self.variant == "min_interp":
            return NeighborhoodSpec(self.spec.p, self.spec.r, "bilinear")
        return self.spec


@dataclass(frozen=True)
class LabelMap:
    """Dense integer labels for every interior pixel of one image."""

    labels: np.ndarray
    label_space: int
    variant: str
    margin: int

    def __post_init__(self) -> None:
        if self.labels.ndim != 2:
            raise ValueError("labels must be a 2-D array")
        if self.label_space <= 0:
            raise ValueError("label_space must be positive")


def label_space(variant: str, p: int) -> int:
    """Number of distinct labels the variant can produce at this p."""
    if variant in ("classic", "circ", "dom", "ni"):
        return 1 << p
    if variant in ("min", "min_interp"):
        return min_label_count(p)
    if variant == "uni":
        return p + 2
    if variant == "num":
        return num_label_space(p)
    if variant == "med":
        return p + 1
    if variant == "cen":
        return 1 << (p // 2 + 1)
    raise ValueError(f"variant {variant!r} has no single label space")


def compute_maps(
    img: GrayImage,
    params: VariantParams,
    with_ci: bool = False,
    engine=None,
):
    """Label map(s) for the variant, optionally with the contrast map.

    Returns ``(maps, ci)`` where ``maps`` is a single :class:`LabelMap` for
    most variants, an ``(upper, lower)`` pair for ``ltp``, and a
    ``(sign, magnitude, center)`` triple for ``clbp``.  ``ci`` is a float
    array of per-pixel contrast values, or None unless requested.
    """
    eng = engine if engine is not None else _default_backend
    spec = params.effective_spec
    m = spec.margin
    if img.width <= 2 * m or img.height <= 2 * m:
        raise ValueError(
            f"image {img.width}x{img.height} too small: needs both sides > {2 * m} for r={spec.r}"
        )
    plan = build_plan(spec)
    center, stack = eng.sample(img.pixels, plan)
    p = spec.p
    v = params.variant

    def make(labels: np.ndarray, space: int, tag: str) -> LabelMap:
        return LabelMap(labels=labels, label_space=space, variant=tag, margin=m)

    if v in ("classic", "circ", "dom"):
        maps = make(eng.lbp_codes(stack, center), 1 << p, v)
    elif v in ("min", "min_interp"):
        table, count = min_code_table(p)
        maps = make(table[eng.lbp_codes(stack, center)], count, v)
    elif v == "uni":
        maps = make(uniform_label_table(p)[eng.lbp_codes(stack, center)], p + 2, v)
    elif v == "num":
        maps = make(num_label_table(p)[eng.lbp_codes(stack, center)], num_label_space(p), v)
    elif v == "ni":
        maps = make(eng.ni_codes(stack), 1 << p, v)
    elif v == "med":
        maps = make(eng.med_counts(stack, center), p + 1, v)
    elif v == "cen":
        maps = make(eng.cen_codes(stack, center, float(params.c)), 1 << (p // 2 + 1), v)
    elif v == "ltp":
        upper, lower = eng.ltp_maps(stack, center, float(params.t))
        maps = (
            make(upper, 1 << p, "ltp_upper"),
            make(lower, 1 << p, "ltp_lower"),
        )
    elif v == "clbp":
        mag_thr = float(np.mean(np.abs(stack - center[None, :, :])))
        cen_thr = float(np.mean(img.pixels.astype(np.float64)))
        s_codes, m_codes, c_bit = eng.clbp_maps(stack, center, mag_thr, cen_thr)
        maps = (
            make(s_codes, 1 << p, "clbp_s"),
            make(m_codes, 1 << p, "clbp_m"),
            make(c_bit, 2, "clbp_c"),
        )
    else:  # pragma: no cover - guarded by VariantParams
        raise ValueError(f"unknown variant {v!r}")

    ci = eng.ci_values(stack, center) if with_ci else None
    return maps, ci


def compute_label_map(img: GrayImage, params: VariantParams, engine=None):
    """Label map(s) for the variant; see :func:`compute_maps`."""
    maps, _ = compute_maps(img, params, with_ci=False, engine=engine)
    return maps


def compute_ci_map(img: GrayImage, spec: NeighborhoodSpec, engine=None) -> np.ndarray:
    """Per-pixel contrast values for the given neighborhood."""
    params = VariantParams("circ", spec)
    _, ci = compute_maps(img, params, with_ci=True, engine=engine)
    return ci


def to_rotation_canonical(label_map: LabelMap) -> LabelMap:
    """Collapse a raw ``2**p`` code map to rotation-minimized dense labels."""
    space = label_map.label_space
    p = space.bit_length() - 1
    if space != (1 << p):
        raise ValueError(f"label space {space} is not a full code space")
    table, count = min_code_table(p)
    return LabelMap(
        labels=table[label_map.labels],
        label_space=count,
        variant=f"{label_map.variant}_min",
        margin=label_map.margin,
    )


__all__ = [
    "VARIANTS",
    "lbp_code",
    "rotate_code",
    "ror_min",
    "uniformity",
    "uniform_label",
    "num_label",
    "num_label_space",
    "ni_code",
    "med_label",
    "cen_code",
    "TernaryCode",
    "ltp_codes",
    "clbp_components",
    "contrast_ci",
    "quantize_sample",
    "min_code_table",
    "uniform_label_table",
    "num_label_table",
    "min_label_count",
    "VariantParams",
    "LabelMap",
    "label_space",
    "compute_maps",
    "compute_label_map",
    "compute_ci_map",
    "to_rotation_canonical",
    "load_backend",
]
