"""Precomputed sampling plans shared by the compiled and pure-Python engines.

The plan pins down every floating-point detail of ring sampling so that the
two engines produce bit-identical sample stacks:

* fractional offsets and the four bilinear weights are computed here, once,
  from the continuous ring offsets;
* both engines must combine the four corner reads as
  ``(w_tl*tl + w_br*br) + (w_tr*tr + w_bl*bl)`` — summing the diagonal pairs
  first keeps the result invariant under quarter-turn relabelings of the
  corners because the fractional parts of mirrored offsets are exact
  complements in binary floating point;
* the combined value is quantized to four decimals (round half-even), which
  also makes interpolation at integer lattice points return the stored
  intensity exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .imagecore import NeighborhoodSpec, nearest_offsets, ring_offsets

#: Reciprocal of the sample quantization step (samples keep 4 decimals).
SAMPLE_SCALE = 10000.0


def quantize_sample(value: float) -> float:
    """Quantize an interpolated sample to four decimals, rounding half-even."""
    return round(value * SAMPLE_SCALE) / SAMPLE_SCALE


@dataclass(frozen=True)
class SamplingPlan:
    """Per-neighbor integer anchors and bilinear weights for one ring."""

    p: int
    r: float
    mode: str
    margin: int
    # nearest mode: integer offsets
    nx: np.ndarray
    ny: np.ndarray
    # bilinear mode: top-left anchor offsets and the four corner weights
    bx: np.ndarray
    by: np.ndarray
    w_tl: np.ndarray
    w_tr: np.ndarray
    w_bl: np.ndarray
    w_br: np.ndarray


def build_plan(spec: NeighborhoodSpec) -> SamplingPlan:
    p = spec.p
    nx = np.zeros(p, dtype=np.int32)
    ny = np.zeros(p, dtype=np.int32)
    bx = np.zeros(p, dtype=np.int32)
    by = np.zeros(p, dtype=np.int32)
    w_tl = np.zeros(p, dtype=np.float64)
    w_tr = np.zeros(p, dtype=np.float64)
    w_bl = np.zeros(p, dtype=np.float64)
    w_br = np.zeros(p, dtype=np.float64)

    for k, (ox, oy) in enumerate(ring_offsets(spec)):
        fx = math.floor(ox)
        fy = math.floor(oy)
        tx = ox - fx
        ty = oy - fy
        bx[k] = fx
        by[k] = fy
        w_tl[k] = (1.0 - tx) * (1.0 - ty)
        w_tr[k] = tx * (1.0 - ty)
        w_bl[k] = (1.0 - tx) * ty
        w_br[k] = tx * ty

    for k, (ix, iy) in enumerate(nearest_offsets(spec)):
        nx[k] = ix
        ny[k] = iy

    for arr in (nx, ny, bx, by, w_tl, w_tr, w_bl, w_br):
        arr.flags.writeable = False

    return SamplingPlan(
        p=p,
        r=spec.r,
        mode=spec.mode,
        margin=spec.margin,
        nx=nx,
        ny=ny,
        bx=bx,
        by=by,
        w_tl=w_tl,
        w_tr=w_tr,
        w_bl=w_bl,
        w_br=w_br,
    )
