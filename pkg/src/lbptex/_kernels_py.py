"""Pure numpy implementation of the per-pixel descriptor kernels.

This module and the compiled extension ``_kernels`` implement the same
engine contract and must produce bit-identical outputs.  Shared rules:

* sample values come from the plan's weights via the diagonal-pair sum
  ``(w_tl*tl + w_br*br) + (w_tr*tr + w_bl*bl)``, then are quantized to four
  decimals (see ``_sampling``);
* every mean (neighbor mean, whole-neighborhood mean, contrast sums)
  accumulates sequentially in neighbor order before the final division;
* the median of the ``p + 1`` neighborhood values is the exact middle order
  statistic (``p`` is even, so the count is odd and no averaging occurs).
"""

from __future__ import annotations

import numpy as np

from ._sampling import SAMPLE_SCALE, SamplingPlan

NAME = "python"


def sample(pixels: np.ndarray, plan: SamplingPlan) -> tuple[np.ndarray, np.ndarray]:
    """Sample the ring around every interior pixel.

    Returns ``(center, stack)`` where ``center`` has shape ``(hi, wi)`` and
    ``stack`` has shape ``(p, hi, wi)`` with ``hi = h - 2*margin``.
    """
    h, w = pixels.shape
    m = plan.margin
    hi = h - 2 * m
    wi = w - 2 * m
    if hi <= 0 or wi <= 0:
        raise ValueError(f"image {w}x{h} too small for margin {m}")
    f = pixels.astype(np.float64)
    center = f[m : m + hi, m : m + wi].copy()
    stack = np.empty((plan.p, hi, wi), dtype=np.float64)

    if plan.mode == "nearest":
        for k in range(plan.p):
            y0 = m + int(plan.ny[k])
            x0 = m + int(plan.nx[k])
            stack[k] = f[y0 : y0 + hi, x0 : x0 + wi]
        return center, stack

    for k in range(plan.p):
        y0 = m + int(plan.by[k])
        x0 = m + int(plan.bx[k])
        tl = f[y0 : y0 + hi, x0 : x0 + wi]
        tr = f[y0 : y0 + hi, x0 + 1 : x0 + 1 + wi]
        bl = f[y0 + 1 : y0 + 1 + hi, x0 : x0 + wi]
        br = f[y0 + 1 : y0 + 1 + hi, x0 + 1 : x0 + 1 + wi]
        raw = (plan.w_tl[k] * tl + plan.w_br[k] * br) + (plan.w_tr[k] * tr + plan.w_bl[k] * bl)
        stack[k] = np.rint(raw * SAMPLE_SCALE) / SAMPLE_SCALE
    return center, stack


def lbp_codes(stack: np.ndarray, center: np.ndarray) -> np.ndarray:
    """Sign codes: bit ``k`` set where ``stack[k] >= center``."""
    p = stack.shape[0]
    codes = np.zeros(center.shape, dtype=np.int32)
    for k in range(p):
        codes |= (stack[k] >= center).astype(np.int32) << k
    return codes


def ni_codes(stack: np.ndarray) -> np.ndarray:
    """Sign codes thresholded at the mean of the ring samples."""
    p = stack.shape[0]
    acc = stack[0].copy()
    for k in range(1, p):
        acc = acc + stack[k]
    mu = acc / float(p)
    codes = np.zeros(mu.shape, dtype=np.int32)
    for k in range(p):
        codes |= (stack[k] >= mu).astype(np.int32) << k
    return codes


def med_counts(stack: np.ndarray, center: np.ndarray) -> np.ndarray:
    """Number of ring samples >= the median of the ``p + 1`` values."""
    p = stack.shape[0]
    block = np.concatenate([center[None, :, :], stack], axis=0)
    med = np.median(block, axis=0)
    counts = np.zeros(center.shape, dtype=np.int32)
    for k in range(p):
        counts += (stack[k] >= med).astype(np.int32)
    return counts


def cen_codes(stack: np.ndarray, center: np.ndarray, c: float) -> np.ndarray:
    """Symmetric-difference codes with a central bit.

    Bit ``k`` (for ``k < p/2``) is set where ``|stack[k] - stack[k + p/2]|
    >= c``; the top bit is set where the center deviates from the mean of
    all ``p + 1`` values by at least ``c``.
    """
    p = stack.shape[0]
    half = p // 2
    codes = np.zeros(center.shape, dtype=np.int32)
    for k in range(half):
        codes |= (np.abs(stack[k] - stack[k + half]) >= c).astype(np.int32) << k
    acc = center.copy()
    for k in range(p):
        acc = acc + stack[k]
    gtot = acc / float(p + 1)
    codes |= (np.abs(center - gtot) >= c).astype(np.int32) << half
    return codes


def ltp_maps(stack: np.ndarray, center: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Upper and lower binary codes of the ternary comparison with width t."""
    p = stack.shape[0]
    upper = np.zeros(center.shape, dtype=np.int32)
    lower = np.zeros(center.shape, dtype=np.int32)
    for k in range(p):
        d = stack[k] - center
        upper |= (d > t).astype(np.int32) << k
        lower |= (d < -t).astype(np.int32) << k
    return upper, lower


def clbp_maps(
    stack: np.ndarray, center: np.ndarray, mag_threshold: float, center_threshold: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sign, magnitude, and center component codes.

    Sign bit ``k``: ``stack[k] - center >= 0``.  Magnitude bit ``k``:
    ``|stack[k] - center| >= mag_threshold``.  Center bit: ``center >=
    center_threshold``.
    """
    p = stack.shape[0]
    s_codes = np.zeros(center.shape, dtype=np.int32)
    m_codes = np.zeros(center.shape, dtype=np.int32)
    for k in range(p):
        d = stack[k] - center
        s_codes |= (d >= 0.0).astype(np.int32) << k
        m_codes |= (np.abs(d) >= mag_threshold).astype(np.int32) << k
    c_bit = (center >= center_threshold).astype(np.int32)
    return s_codes, m_codes, c_bit


def ci_values(stack: np.ndarray, center: np.ndarray) -> np.ndarray:
    """Contrast: sum of samples >= center minus sum of samples below."""
    p = stack.shape[0]
    ge = np.zeros(center.shape, dtype=np.float64)
    lt = np.zeros(center.shape, dtype=np.float64)
    for k in range(p):
        mask = stack[k] >= center
        ge = ge + np.where(mask, stack[k], 0.0)
        lt = lt + np.where(mask, 0.0, stack[k])
    return ge - lt
