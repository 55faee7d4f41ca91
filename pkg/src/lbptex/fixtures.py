"""Deterministic synthetic textures and ready-to-run dataset fixtures.

The generators build small grayscale scenes that are cheap to classify yet
distinguishable by local pattern statistics: a flat field, an independent
speckle field, and sinusoidal gratings at two scales.  The dataset writers
lay out PGM files plus a JSON manifest understood by the experiment
harness.
"""

from __future__ import annotations

import json
import math
import os
from typing import Sequence

import numpy as np

from .imagecore import GrayImage, apply_monotone_map, gain_table, largest_valid_center_crop, rotate_image, write_pgm

TEXTURE_IDS = ("flat", "speckle", "waves_fine", "waves_coarse")


def constant_texture(size: int, value: int = 128) -> GrayImage:
    return GrayImage.constant(size, size, value)

def speckle_texture(size: int, seed, low: int = 0, high: int = 255) -> GrayImage:
    """Independent uniform intensities in [low, high]."""
    rng = np.random.default_rng(seed)
    return GrayImage(rng.integers(low, high + 1, size=(size, size), dtype=np.int64))


def grating_texture(
    size: int,
    period: float,
    phase: float = 0.0,
    amplitude: float = 100.0,
    offset: float = 128.0,
) -> GrayImage:
    """Horizontal sinusoidal grating: intensity varies along x."""
    if period <= 0:
        raise ValueError(f"period must be positive, got {period}")
    x = np.arange(size, dtype=np.float64)
    row = offset + amplitude * np.sin(2.0 * math.pi * x / period + phase)
    img = np.tile(row, (size, 1))
    return GrayImage(np.clip(np.rint(img), 0, 255).astype(np.int64))


def stripe_texture(
    size: int, period: int, shift: int = 0, low: int = 20, high: int = 235
) -> GrayImage:
    """Vertical bars of alternating intensity with the given column period.

    Shifting by whole columns permutes the pattern; when the period divides
    the analyzed width, shifted instances have identical label histograms.
    """
    if period < 2:
        raise ValueError(f"period must be at least 2, got {period}")
    x = (np.arange(size) + shift) % period
    row = np.where(x < period // 2, high, low)
    return GrayImage(np.tile(row, (size, 1)).astype(np.int64))


def blob_texture(size: int, seed, scale: int, low: int = 0, high: int = 255) -> GrayImage:
    """Random field box-filtered at the given scale, stretched to [low, high].

    Larger scales give smoother, coarser structure; ``scale=1`` degenerates
    to independent speckle.
    """
    if scale < 1:
        raise ValueError(f"scale must be at least 1, got {scale}")
    rng = np.random.default_rng(seed)
    field = rng.uniform(0.0, 1.0, (size + scale, size + scale))
    integral = np.pad(np.cumsum(np.cumsum(field, 0), 1), ((1, 0), (1, 0)))
    sums = (
        integral[scale:, scale:]
        - integral[:-scale, scale:]
        - integral[scale:, :-scale]
        + integral[:-scale, :-scale]
    )[:size, :size]
    lo, hi = float(sums.min()), float(sums.max())
    if hi <= lo:
        return constant_texture(size, (low + high) // 2)
    scaled = low + (sums - lo) / (hi - lo) * (high - low)
    return GrayImage(np.rint(scaled).astype(np.int64))


def standard_textures(
    size: int,
    seed: int,
    instance: int = 0,
    low: int = 20,
    high: int = 235,
) -> dict[str, GrayImage]:
    """One instance of each standard texture.

    Instances differ by the speckle field and by whole-column shifts of the
    stripe patterns; the stripe periods (4 and 12) divide the interior
    width analyzed at r=1 for the default 64-pixel size.
    """
    mid = (low + high) // 2
    return {
        "flat": constant_texture(size, mid),
        "speckle": speckle_texture(size, (seed, instance, 1), low, high),
        "stripes_fine": stripe_texture(size, 4, instance, low, high),
        "stripes_coarse": stripe_texture(size, 12, 3 * instance, low, high),
    }


def write_manifest(records: Sequence[dict], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(records, fh, sort_keys=True, indent=2)
        fh.write("\n")


def make_rotation_dataset(
    out_dir, seed: int = 0, size: int = 64, angles: Sequence[float] = (90.0, 180.0, 270.0)
) -> str:
    """References plus rotated-and-cropped test images for each angle.

    Quarter-turn angles keep the full frame; other angles are cropped to
    the largest centered square of valid pixels.
    """
    os.makedirs(out_dir, exist_ok=True)
    records = []
    textures = standard_textures(size, seed)
    for tid, img in textures.items():
        ref_name = f"{tid}_ref.pgm"
        write_pgm(img, os.path.join(out_dir, ref_name))
        records.append({"path": ref_name, "texture_id": tid, "condition": "reference"})
        for angle in angles:
            rot, mask = rotate_image(img, angle)
            if not bool(mask.all()):
                rot = largest_valid_center_crop(rot, mask)
            test_name = f"{tid}_rot{int(round(angle)):03d}.pgm"
            write_pgm(rot, os.path.join(out_dir, test_name))
            records.append(
                {
                    "path": test_name,
                    "texture_id": tid,
                    "condition": "rotation",
                    "angle": float(angle),
                }
            )
    manifest_path = os.path.join(out_dir, "manifest.json")
    write_manifest(records, manifest_path)
    return manifest_path


def noise_study_textures(size: int, seed: int, instance: int = 0) -> dict[str, GrayImage]:
    """Texture set for degradation studies: structure at several scales.

    The box-filtered fields keep coarse structure that partially survives
    heavy noise, which separates robust descriptors from fragile ones.
    """
    return {
        "flat": constant_texture(size, 128),
        "speckle": speckle_texture(size, (seed, instance, 1), 0, 255),
        "blob_fine": blob_texture(size, (seed, instance, 3), 3),
        "blob_coarse": blob_texture(size, (seed, instance, 9), 9),
    }


def make_noise_dataset(out_dir, seed: int = 0, size: int = 64, instances: int = 3) -> str:
    """Clean references plus fresh unrotated instances of each texture.

    Noise itself is injected at experiment time, so the same fixture serves
    both the clean baseline and the degraded runs.
    """
    if instances < 1:
        raise ValueError("need at least one test instance per texture")
    os.makedirs(out_dir, exist_ok=True)
    records = []
    refs = noise_study_textures(size, seed, instance=0)
    for tid, img in refs.items():
        name = f"{tid}_ref.pgm"
        write_pgm(img, os.path.join(out_dir, name))
        records.append({"path": name, "texture_id": tid, "condition": "reference"})
    for inst in range(1, instances + 1):
        tex = noise_study_textures(size, seed, instance=inst)
        for tid, img in tex.items():
            name = f"{tid}_t{inst}.pgm"
            write_pgm(img, os.path.join(out_dir, name))
            records.append(
                {"path": name, "texture_id": tid, "condition": "rotation", "angle": 0.0}
            )
    manifest_path = os.path.join(out_dir, "manifest.json")
    write_manifest(records, manifest_path)
    return manifest_path


def make_illumination_dataset(
    out_dir, seed: int = 0, size: int = 64, gains: Sequence[float] = (1.0, 1.5, 2.0)
) -> str:
    """References plus gain-remapped test instances.

    Base textures stay within [0, 127] so a gain of 2 never clips, keeping
    the transform strictly monotone over the occupied range.
    """
    os.makedirs(out_dir, exist_ok=True)
    records = []
    base_kwargs = dict(low=10, high=120)
    refs = standard_textures(size, seed, instance=0, **base_kwargs)
    for tid, img in refs.items():
        name = f"{tid}_ref.pgm"
        write_pgm(img, os.path.join(out_dir, name))
        records.append({"path": name, "texture_id": tid, "condition": "reference"})
    for gi, gain in enumerate(gains):
        table = gain_table(gain)
        tex = standard_textures(size, seed, instance=gi + 1, **base_kwargs)
        for tid, img in tex.items():
            lit = apply_monotone_map(img, table)
            name = f"{tid}_illum{gi}.pgm"
            write_pgm(lit, os.path.join(out_dir, name))
            records.append(
                {
                    "path": name,
                    "texture_id": tid,
                    "condition": "illumination",
                    "illum": gi,
                }
            )
    manifest_path = os.path.join(out_dir, "manifest.json")
    write_manifest(records, manifest_path)
    return manifest_path
