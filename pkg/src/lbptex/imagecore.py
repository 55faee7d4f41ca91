"""Grayscale raster type, sampling, geometric and photometric transforms, I/O.

All images are 8-bit single-channel rasters addressed as ``pixels[y, x]``
(row-major).  Coordinates handed to the samplers are ``(x, y)`` pairs in
pixel units with the origin at the top-left pixel center.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DataError, ImageFormatError

#: BT.601 luminance weights used to collapse RGB inputs to gray.
GRAY_WEIGHTS = (0.299, 0.587, 0.114)

SAMPLING_MODES = ("nearest", "bilinear")


class GrayImage:
    """Immutable 8-bit grayscale image backed by a ``numpy`` array."""

    __slots__ = ("_pixels",)

    def __init__(self, pixels) -> None:
        arr = np.asarray(pixels)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D raster, got shape {arr.shape}")
        if arr.size == 0:
            raise ValueError("image must not be empty")
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"pixel values must be integers, got dtype {arr.dtype}")
        lo, hi = int(arr.min()), int(arr.max())
        if lo < 0 or hi > 255:
            raise ValueError(f"pixel values outside [0, 255]: min={lo} max={hi}")
        out = arr.astype(np.uint8, order="C", copy=True)
        out.flags.writeable = False
        self._pixels = out

    @property
    def pixels(self) -> np.ndarray:
        """Read-only ``uint8`` array of shape ``(height, width)``."""
        return self._pixels

    @property
    def width(self) -> int:
        return self._pixels.shape[1]

    @property
    def height(self) -> int:
        return self._pixels.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self._pixels.shape

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._pixels
        return self._pixels.astype(dtype)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self._pixels, other._pixels)

    def __repr__(self) -> str:
        return f"GrayImage({self.width}x{self.height})"

    @classmethod
    def constant(cls, width: int, height: int, value: int) -> "GrayImage":
        return cls(np.full((height, width), value, dtype=np.uint8))


class SamplePoint(NamedTuple):
    """Continuous image-plane location, ``x`` along columns, ``y`` along rows."""

    x: float
    y: float


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Circularly symmetric neighbor set: ``p`` samples on a radius-``r`` ring."""

    p: int = 8
    r: float = 1.0
    mode: str = "bilinear"

    def __post_init__(self) -> None:
        if self.p < 4 or self.p % 2 != 0:
            raise ValueError(f"p must be an even integer >= 4, got {self.p}")
        if self.p > 24:
            raise ValueError(f"p={self.p} is unsupported (max 24)")
        if not self.r > 0:
            raise ValueError(f"r must be positive, got {self.r}")
        if self.mode not in SAMPLING_MODES:
            raise ValueError(f"mode must be one of {SAMPLING_MODES}, got {self.mode!r}")

    @property
    def margin(self) -> int:
        """Border width that keeps every neighbor read inside the image."""
        return int(math.ceil(self.r)) + 1


def ring_offsets(spec: NeighborhoodSpec) -> list[tuple[float, float]]:
    """Continuous ``(dx, dy)`` offsets of the ring samples around a center.

    Sample ``k`` sits at angle ``2*pi*k / p`` measured counterclockwise from
    the positive x axis, so its offset is ``(r*cos(a), -r*sin(a))`` in
    image coordinates (y grows downward).
    """
    out = []
    for k in range(spec.p):
        ang = 2.0 * math.pi * k / spec.p
        out.append((spec.r * math.cos(ang), -spec.r * math.sin(ang)))
    return out


def nearest_offsets(spec: NeighborhoodSpec) -> list[tuple[int, int]]:
    """Integer ``(dx, dy)`` offsets used by nearest-neighbor sampling.

    Each continuous offset is rounded half-even per axis; anchoring the
    rounding to the offset (not the absolute coordinate) keeps the
    neighborhood shape identical at every center.
    """
    return [(round(ox), round(oy)) for ox, oy in ring_offsets(spec)]


def neighbor_coordinates(spec: NeighborhoodSpec, center: tuple[int, int]) -> list[SamplePoint]:
    """Absolute sample locations around ``center = (x, y)``."""
    x0, y0 = center
    m = spec.margin
    if x0 < m or y0 < m:
        raise ValueError(f"center {center} closer than {m} pixels to the border")
    return [SamplePoint(x0 + ox, y0 + oy) for ox, oy in ring_offsets(spec)]


def sample_bilinear(img: GrayImage, point: tuple[float, float]) -> float:
    """Bilinearly interpolated intensity at a continuous location.

    Uses the two-stage lerp form, which returns the stored value exactly at
    lattice points and never leaves the range of the four corner values.
    """
    x, y = float(point[0]), float(point[1])
    h, w = img.shape
    if not (0.0 <= x <= w - 1 and 0.0 <= y <= h - 1):
        raise ValueError(f"sample point {point} outside [0, {w - 1}] x [0, {h - 1}]")
    x0 = min(int(math.floor(x)), w - 2) if w > 1 else 0
    y0 = min(int(math.floor(y)), h - 2) if h > 1 else 0
    tx = x - x0
    ty = y - y0
    px = img.pixels
    v00 = float(px[y0, x0])
    v01 = float(px[y0, min(x0 + 1, w - 1)])
    v10 = float(px[min(y0 + 1, h - 1), x0])
    v11 = float(px[min(y0 + 1, h - 1), min(x0 + 1, w - 1)])
    top = v00 + tx * (v01 - v00)
    bot = v10 + tx * (v11 - v10)
    return top + ty * (bot - top)


def rotate_image(img: GrayImage, angle: float) -> tuple[GrayImage, np.ndarray]:
    """Rotate counterclockwise about the image center.

    Returns the rotated raster together with a boolean validity mask; output
    pixels whose source location falls outside the original footprint are 0
    and masked invalid.  Multiples of 90 degrees are exact grid permutations
    (quarter turns require a square image, 180 works for any shape).
    """
    px = img.pixels
    h, w = px.shape
    a = float(angle) % 360.0
    if a == 0.0:
        return GrayImage(px), np.ones((h, w), dtype=bool)
    if a == 180.0:
        return GrayImage(np.rot90(px, 2)), np.ones((h, w), dtype=bool)
    if a in (90.0, 270.0) and h == w:
        k = 1 if a == 90.0 else 3
        return GrayImage(np.rot90(px, k)), np.ones((h, w), dtype=bool)

    cx = (w - 1) / 2.0
    cy = (h - 1) / 2.0
    rad = math.radians(a)
    cosa, sina = math.cos(rad), math.sin(rad)
    yy, xx = np.meshgrid(np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij")
    dx = xx - cx
    dy = yy - cy
    # Inverse map: source location that lands on each output pixel.
    xs = cx + cosa * dx - sina * dy
    ys = cy + sina * dx + cosa * dy
    valid = (xs >= 0.0) & (xs <= w - 1) & (ys >= 0.0) & (ys <= h - 1)

    x0 = np.clip(np.floor(xs), 0, max(w - 2, 0)).astype(np.intp)
    y0 = np.clip(np.floor(ys), 0, max(h - 2, 0)).astype(np.intp)
    tx = np.clip(xs - x0, 0.0, 1.0)
    ty = np.clip(ys - y0, 0.0, 1.0)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    f = px.astype(np.float64)
    v00 = f[y0, x0]
    v01 = f[y0, x1]
    v10 = f[y1, x0]
    v11 = f[y1, x1]
    top = v00 + tx * (v01 - v00)
    bot = v10 + tx * (v11 - v10)
    val = top + ty * (bot - top)
    out = np.rint(val).astype(np.int64)
    out[~valid] = 0
    return GrayImage(out), valid


def largest_valid_center_crop(img: GrayImage, mask: np.ndarray) -> GrayImage:
    """Largest centered square crop whose pixels are all mask-valid."""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != img.shape:
        raise ValueError("mask shape does not match image shape")
    h, w = img.shape
    ch, cw = h // 2, w // 2
    lo, hi = 0, min(ch, cw, h - ch, w - cw)

    def ok(k: int) -> bool:
        if k == 0:
            return bool(mask[ch, cw]) if h > ch and w > cw else False
        return bool(np.all(mask[ch - k : ch + k, cw - k : cw + k]))

    if not ok(lo):
        raise DataError("no valid pixels at the image center")
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if ok(mid):
            lo = mid
        else:
            hi = mid - 1
    k = lo
    if k == 0:
        return GrayImage(img.pixels[ch : ch + 1, cw : cw + 1])
    return GrayImage(img.pixels[ch - k : ch + k, cw - k : cw + k])


def add_gaussian_noise(img: GrayImage, variance: float, seed: int) -> GrayImage:
    """Additive zero-mean Gaussian noise in the normalized [0, 1] domain.

    Intensities are scaled to [0, 1], noise with the given variance is
    added, the result is clipped to [0, 1] and rescaled back to 8 bits.
    Deterministic for a fixed seed.
    """
    if variance < 0:
        raise ValueError(f"variance must be non-negative, got {variance}")
    rng = np.random.default_rng(seed)
    x = img.pixels.astype(np.float64) / 255.0
    y = x + rng.normal(0.0, math.sqrt(variance), size=x.shape)
    y = np.clip(y, 0.0, 1.0)
    return GrayImage(np.rint(y * 255.0).astype(np.int64))


def apply_monotone_map(img: GrayImage, table: Sequence[int]) -> GrayImage:
    """Remap intensities through a monotone nondecreasing 256-entry table."""
    lut = np.asarray(table)
    if lut.shape != (256,):
        raise ValueError(f"table must have exactly 256 entries, got shape {lut.shape}")
    if not np.issubdtype(lut.dtype, np.integer):
        raise ValueError("table entries must be integers")
    if int(lut.min()) < 0 or int(lut.max()) > 255:
        raise ValueError("table entries must lie in [0, 255]")
    if np.any(np.diff(lut.astype(np.int64)) < 0):
        raise ValueError("table must be monotone nondecreasing")
    return GrayImage(lut.astype(np.uint8)[img.pixels])


def gain_table(gain: float) -> list[int]:
    """Monotone lookup table for a multiplicative luminance gain."""
    if gain < 0:
        raise ValueError(f"gain must be non-negative, got {gain}")
    return [min(255, int(round(gain * v))) for v in range(256)]


def luminance(rgb: np.ndarray) -> np.ndarray:
    """Collapse an ``(..., 3)`` RGB array to rounded 8-bit luminance."""
    arr = np.asarray(rgb, dtype=np.float64)
    if arr.shape[-1] != 3:
        raise ValueError(f"expected 3 channels, got {arr.shape[-1]}")
    y = GRAY_WEIGHTS[0] * arr[..., 0] + GRAY_WEIGHTS[1] * arr[..., 1] + GRAY_WEIGHTS[2] * arr[..., 2]
    return np.rint(y).astype(np.uint8)


# ---------------------------------------------------------------------------
# File I/O


def _read_pgm_tokens(data: bytes, count: int, start: int) -> tuple[list[int], int]:
    """Read `count` whitespace-separated ASCII integers, skipping # comments."""
    tokens: list[int] = []
    i = start
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i] == ord("#"):
            while i < n and data[i] not in (0x0A, 0x0D):
                i += 1
            continue
        j = i
        while j < n and not data[j : j + 1].isspace():
            j += 1
        if j == i:
            raise ImageFormatError("truncated PGM header")
        try:
            tokens.append(int(data[i:j]))
        except ValueError as exc:
            raise ImageFormatError(f"bad PGM header token {data[i:j]!r}") from exc
        i = j
    return tokens, i


def read_pgm(path: str | os.PathLike) -> GrayImage:
    """Read a binary (P5) PGM file with maxval 255."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ImageFormatError(f"cannot read {path}: {exc}") from exc
    if data[:2] != b"P5":
        raise ImageFormatError(f"{path}: not a binary PGM (P5) file")
    (w, h, maxval), pos = _read_pgm_tokens(data, 3, 2)
    if w <= 0 or h <= 0:
        raise ImageFormatError(f"{path}: bad dimensions {w}x{h}")
    if maxval != 255:
        raise ImageFormatError(f"{path}: only 8-bit PGM supported, maxval={maxval}")
    pos += 1  # single whitespace byte after the header
    raster = data[pos : pos + w * h]
    if len(raster) != w * h:
        raise ImageFormatError(f"{path}: truncated raster ({len(raster)} of {w * h} bytes)")
    return GrayImage(np.frombuffer(raster, dtype=np.uint8).reshape(h, w))


def write_pgm(img: GrayImage, path: str | os.PathLike) -> None:
    """Write a binary (P5) PGM file."""
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(img.pixels.tobytes())


def read_image(path: str | os.PathLike) -> GrayImage:
    """Read a PGM or PNG image as grayscale.

    PNG support requires Pillow; color inputs are collapsed with the
    luminance rule (alpha, if present, is ignored).
    """
    spath = os.fspath(path)
    ext = os.path.splitext(spath)[1].lower()
    if ext in ("", ".pgm"):
        return read_pgm(spath)
    if ext == ".png":
        try:
            from PIL import Image
        except ImportError as exc:
            raise ImageFormatError("PNG support requires the Pillow package") from exc
        try:
            with Image.open(spath) as im:
                if im.mode == "L":
                    return GrayImage(np.asarray(im))
                rgb = im.convert("RGBA") if "A" in im.getbands() else im.convert("RGB")
                arr = np.asarray(rgb)[..., :3]
                return GrayImage(luminance(arr))
        except OSError as exc:
            raise ImageFormatError(f"cannot read {spath}: {exc}") from exc
    raise ImageFormatError(f"{spath}: unsupported image extension {ext!r}")
