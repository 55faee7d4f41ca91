"""Dataset manifests, the image-to-feature pipeline, and experiment runners.

A manifest is a JSON array of records ``{path, texture_id, condition,
angle?, illum?}`` where ``condition`` is ``reference``, ``rotation``, or
``illumination``.  Relative paths are resolved against the manifest's
directory.  Every experiment classifies the non-reference records against
the references with a nearest-neighbor rule and reports confusion matrices
and accuracy rates.

Feature policy per variant: single-map variants histogram their label map
directly; ``ltp`` concatenates the upper and lower code histograms;
``clbp`` joins the uniform-mapped sign and magnitude codes with the center
bit and concatenates the two joint histograms; ``ni`` codes are collapsed
to their rotation-minimized form before histogramming; ``dom`` features are
reduced to descending dominant-pattern frequencies at comparison time.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .classify import (
    ConfusionMatrix,
    accuracy_rate,
    confusion_matrix,
    distances_to_references,
    make_reference_set,
)
from .descriptors import (
    LabelMap,
    VariantParams,
    compute_maps,
    to_rotation_canonical,
    uniform_label_table,
)
from .errors import ConfigError, ManifestError
from .histograms import (
    CIQuantizer,
    Histogram,
    build_histogram,
    concat_histogram,
    dominant_patterns,
    fit_ci_quantizer,
    joint_histogram,
)
from .imagecore import GrayImage, NeighborhoodSpec, add_gaussian_noise, read_image

CONDITIONS = ("reference", "rotation", "illumination")
CI_MODES = ("none", "joint", "concat")

DEFAULT_VARIANTS = ("classic", "min", "min_interp", "uni", "num", "ni", "med")
DEFAULT_RADIUS_VARIANTS = ("min", "min_interp", "uni", "num", "med")
DEFAULT_METRICS = ("od", "kl")

#: Multiplier that derives a per-image noise seed from the experiment seed.
_NOISE_SEED_STRIDE = 1000003


# ---------------------------------------------------------------------------
# Manifests


@dataclass(frozen=True)
class ManifestRecord:
    """One dataset image: where it lives and what it depicts."""

    path: str
    texture_id: str
    condition: str
    angle: float | None = None
    illum: int | None = None
    resolved_path: str = ""

    def load(self) -> GrayImage:
        return read_image(self.resolved_path or self.path)


def ingest_manifest(path) -> list[ManifestRecord]:
    """Parse and validate a dataset manifest.

    Guarantees at least one reference, exactly one reference per texture,
    and that every test texture also has a reference.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, list) or not raw:
        raise ManifestError(f"manifest {path} must be a non-empty JSON array")

    base = os.path.dirname(os.path.abspath(os.fspath(path)))
    records = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict):
            raise ManifestError(f"manifest entry {i} is not an object")
        try:
            rel = str(item["path"])
            tid = str(item["texture_id"])
            cond = str(item["condition"])
        except KeyError as exc:
            raise ManifestError(f"manifest entry {i} missing key {exc}") from exc
        if cond not in CONDITIONS:
            raise ManifestError(
                f"manifest entry {i}: condition {cond!r} not in {CONDITIONS}"
            )
        angle = item.get("angle")
        illum = item.get("illum")
        if angle is not None:
            angle = float(angle)
        if illum is not None:
            illum = int(illum)
        resolved = rel if os.path.isabs(rel) else os.path.join(base, rel)
        records.append(
            ManifestRecord(
                path=rel,
                texture_id=tid,
                condition=cond,
                angle=angle,
                illum=illum,
                resolved_path=resolved,
            )
        )

    refs = [r for r in records if r.condition == "reference"]
    if not refs:
        raise ManifestError(f"manifest {path} has no reference records")
    ref_ids = [r.texture_id for r in refs]
    if len(set(ref_ids)) != len(ref_ids):
        raise ManifestError(f"manifest {path} has multiple references for one texture")
    ref_set = set(ref_ids)
    for r in records:
        if r.condition != "reference" and r.texture_id not in ref_set:
            raise ManifestError(
                f"test texture {r.texture_id!r} has no reference in manifest {path}"
            )
    return records


# ---------------------------------------------------------------------------
# Feature pipeline


def _single_map(maps, variant: str) -> LabelMap:
    if variant == "ni":
        return to_rotation_canonical(maps)
    if isinstance(maps, tuple):
        raise ConfigError(f"variant {variant!r} does not produce a single label map")
    return maps


def _base_histogram(maps, params: VariantParams) -> Histogram:
    v = params.variant
    if v == "ltp":
        upper, lower = maps
        counts = np.concatenate([build_histogram(upper).counts, build_histogram(lower).counts])
        return Histogram(counts=counts, variant="ltp")
    if v == "clbp":
        s_map, m_map, c_map = maps
        p = params.effective_spec.p
        table = uniform_label_table(p)
        s_u = LabelMap(table[s_map.labels], p + 2, "clbp_s", s_map.margin)
        m_u = LabelMap(table[m_map.labels], p + 2, "clbp_m", m_map.margin)
        h_s = joint_histogram(s_u, c_map.labels, 2)
        h_m = joint_histogram(m_u, c_map.labels, 2)
        return Histogram(counts=np.concatenate([h_s.counts, h_m.counts]), variant="clbp")
    if v == "ni":
        return build_histogram(to_rotation_canonical(maps))
    return build_histogram(maps)


def compute_feature(
    img: GrayImage,
    params: VariantParams,
    *,
    ci_mode: str = "none",
    ci_quantizer: CIQuantizer | None = None,
    engine=None,
) -> Histogram:
    """Histogram feature for one image under the variant's feature policy.

    ``ci_mode='joint'`` forms the joint label/contrast histogram (single-map
    variants only); ``'concat'`` appends an independently normalized
    contrast histogram.  Both need a quantizer fitted on reference images.
    """
    if ci_mode not in CI_MODES:
        raise ConfigError(f"ci_mode must be one of {CI_MODES}, got {ci_mode!r}")
    want_ci = ci_mode != "none"
    maps, ci = compute_maps(img, params, with_ci=want_ci, engine=engine)
    base = _base_histogram(maps, params)
    if ci_mode == "none":
        return base
    if ci_quantizer is None:
        raise ConfigError(f"ci_mode={ci_mode!r} requires a fitted contrast quantizer")
    bins = ci_quantizer.quantize(ci)
    if ci_mode == "joint":
        if params.variant in ("ltp", "clbp"):
            raise ConfigError(f"joint contrast mode is not defined for {params.variant!r}")
        return joint_histogram(_single_map(maps, params.variant), bins, ci_quantizer.n_bins)
    ci_hist = Histogram(
        counts=np.bincount(bins.ravel(), minlength=ci_quantizer.n_bins).astype(np.int64),
        variant="ci",
    )
    return concat_histogram(base, ci_hist)


def feature_vector(hist: Histogram, variant: str, dom_coverage: float = 0.8) -> np.ndarray:
    """Vector handed to the metrics; applies the dominant reduction for dom."""
    if variant == "dom":
        return dominant_patterns(hist, dom_coverage).frequencies
    return hist.counts.astype(np.float64)


def fit_reference_quantizer(
    ref_images: Sequence[GrayImage],
    params: VariantParams,
    ci_bins: int,
    engine=None,
) -> CIQuantizer:
    """Equal-population contrast quantizer fitted on reference images only."""
    chunks = []
    for img in ref_images:
        _, ci = compute_maps(img, params, with_ci=True, engine=engine)
        chunks.append(ci.ravel())
    return fit_ci_quantizer(np.concatenate(chunks), ci_bins)


# ---------------------------------------------------------------------------
# Classification runs


@dataclass(frozen=True)
class ClassificationRun:
    """Outcome of classifying one manifest with one variant/metric pair."""

    variant: str
    metric: str
    confusion: ConfusionMatrix
    accuracy: float
    tests: list[dict]

    def to_json_dict(self) -> dict:
        return {
            "variant": self.variant,
            "metric": self.metric,
            "class_ids": list(self.confusion.class_ids),
            "confusion": [[int(c) for c in row] for row in self.confusion.counts],
            "accuracy_rate": self.accuracy,
            "tests": self.tests,
        }


def classify_records(
    records: Sequence[ManifestRecord],
    params: VariantParams,
    metric: str,
    *,
    ci_mode: str = "none",
    ci_bins: int = 8,
    dom_coverage: float = 0.8,
    transform: Callable[[GrayImage, ManifestRecord, int], GrayImage] | None = None,
    engine=None,
) -> ClassificationRun:
    """Nearest-reference classification of every non-reference record.

    ``transform`` is applied to test images only (references stay clean);
    it receives the image, its record, and the test index.
    """
    refs = [r for r in records if r.condition == "reference"]
    tests = [r for r in records if r.condition != "reference"]
    if not refs:
        raise ManifestError("no reference records")
    if not tests:
        raise ManifestError("no test records")

    ref_images = [r.load() for r in refs]
    quantizer = None
    if ci_mode != "none":
        quantizer = fit_reference_quantizer(ref_images, params, ci_bins, engine=engine)

    ref_pairs = []
    for rec, img in zip(refs, ref_images):
        hist = compute_feature(img, params, ci_mode=ci_mode, ci_quantizer=quantizer, engine=engine)
        ref_pairs.append((rec.texture_id, feature_vector(hist, params.variant, dom_coverage)))
    refset = make_reference_set(ref_pairs, metric=metric, ragged=params.variant == "dom")

    rows = []
    pairs = []
    for i, rec in enumerate(tests):
        img = rec.load()
        if transform is not None:
            img = transform(img, rec, i)
        hist = compute_feature(img, params, ci_mode=ci_mode, ci_quantizer=quantizer, engine=engine)
        fv = feature_vector(hist, params.variant, dom_coverage)
        dists = distances_to_references(fv, refset)
        pred = refset.entries[int(np.argmin(dists))].texture_id
        pairs.append((rec.texture_id, pred))
        row = {
            "path": rec.path,
            "texture_id": rec.texture_id,
            "predicted": pred,
            "distances": {tid: d for tid, d in zip(refset.texture_ids, dists)},
        }
        if rec.angle is not None:
            row["angle"] = rec.angle
        if rec.illum is not None:
            row["illum"] = rec.illum
        rows.append(row)

    matrix = confusion_matrix(pairs, [r.texture_id for r in refs])
    return ClassificationRun(
        variant=params.variant,
        metric=metric,
        confusion=matrix,
        accuracy=accuracy_rate(matrix),
        tests=rows,
    )


def _mean_self_distances(run: ClassificationRun) -> dict[str, float]:
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for row in run.tests:
        tid = row["texture_id"]
        if tid in row["distances"]:
            sums[tid] = sums.get(tid, 0.0) + row["distances"][tid]
            counts[tid] = counts.get(tid, 0) + 1
    return {tid: sums[tid] / counts[tid] for tid in sorted(sums)}


def _params_dict(params: VariantParams, **extra) -> dict:
    spec = params.spec
    out = {
        "p": spec.p,
        "r": spec.r,
        "mode": spec.mode,
        "t": params.t,
        "c": params.c,
    }
    out.update(extra)
    return out


# ---------------------------------------------------------------------------
# Experiments


def run_rotation_experiment(
    records: Sequence[ManifestRecord],
    variants: Sequence[str] = DEFAULT_VARIANTS,
    metrics: Sequence[str] = DEFAULT_METRICS,
    spec: NeighborhoodSpec = NeighborhoodSpec(),
    *,
    t: float = 1.0,
    c: float = 3.0,
    engine=None,
) -> dict:
    """Classify rotated test images against upright references."""
    runs = []
    for variant in variants:
        params = VariantParams(variant, spec, t=t, c=c)
        for metric in metrics:
            run = classify_records(records, params, metric, engine=engine)
            d = run.to_json_dict()
            d["mean_self_distance"] = _mean_self_distances(run)
            runs.append(d)
    return {
        "experiment": "rotation",
        "parameters": _params_dict(VariantParams(variants[0], spec, t=t, c=c)),
        "runs": runs,
    }


def run_radius_sweep(
    records: Sequence[ManifestRecord],
    variants: Sequence[str] = DEFAULT_RADIUS_VARIANTS,
    metrics: Sequence[str] = DEFAULT_METRICS,
    radii: Sequence[float] = (1.0, 2.0, 3.0),
    p: int = 8,
    mode: str = "bilinear",
    *,
    t: float = 1.0,
    c: float = 3.0,
    engine=None,
) -> dict:
    """Accuracy per neighborhood radius for each variant/metric pair."""
    rows = []
    for r in radii:
        spec = NeighborhoodSpec(p, float(r), mode)
        for variant in variants:
            params = VariantParams(variant, spec, t=t, c=c)
            for metric in metrics:
                run = classify_records(records, params, metric, engine=engine)
                rows.append(
                    {
                        "r": float(r),
                        "variant": variant,
                        "metric": metric,
                        "accuracy_rate": run.accuracy,
                    }
                )
    return {
        "experiment": "radius",
        "parameters": {"p": p, "mode": mode, "t": t, "c": c, "radii": [float(r) for r in radii]},
        "rows": rows,
    }


def run_noise_experiment(
    records: Sequence[ManifestRecord],
    variants: Sequence[str] = DEFAULT_VARIANTS,
    metrics: Sequence[str] = DEFAULT_METRICS,
    spec: NeighborhoodSpec = NeighborhoodSpec(),
    *,
    variance: float = 0.06,
    seed: int = 0,
    t: float = 1.0,
    c: float = 3.0,
    engine=None,
) -> dict:
    """Accuracy on clean versus noise-degraded test images.

    Test image ``i`` receives Gaussian noise seeded with
    ``seed * 1000003 + i`` so runs are deterministic yet fields differ
    across images.
    """
    if variance < 0:
        raise ConfigError(f"variance must be non-negative, got {variance}")

    def noisy(img: GrayImage, rec: ManifestRecord, i: int) -> GrayImage:
        return add_gaussian_noise(img, variance, seed * _NOISE_SEED_STRIDE + i)

    rows = []
    for variant in variants:
        params = VariantParams(variant, spec, t=t, c=c)
        for metric in metrics:
            clean = classify_records(records, params, metric, engine=engine)
            degraded = classify_records(records, params, metric, transform=noisy, engine=engine)
            rows.append(
                {
                    "variant": variant,
                    "metric": metric,
                    "accuracy_clean": clean.accuracy,
                    "accuracy_noisy": degraded.accuracy,
                }
            )
    return {
        "experiment": "noise",
        "parameters": _params_dict(
            VariantParams(variants[0], spec, t=t, c=c), variance=variance, seed=seed
        ),
        "rows": rows,
    }


def run_illumination_experiment(
    records: Sequence[ManifestRecord],
    variants: Sequence[str] = DEFAULT_VARIANTS,
    metrics: Sequence[str] = DEFAULT_METRICS,
    spec: NeighborhoodSpec = NeighborhoodSpec(),
    *,
    ci_mode: str = "none",
    ci_bins: int = 8,
    t: float = 1.0,
    c: float = 3.0,
    engine=None,
) -> dict:
    """Classify re-lit test images, optionally augmenting with contrast."""
    if ci_mode not in CI_MODES:
        raise ConfigError(f"ci_mode must be one of {CI_MODES}, got {ci_mode!r}")
    runs = []
    for variant in variants:
        params = VariantParams(variant, spec, t=t, c=c)
        for metric in metrics:
            run = classify_records(
                records, params, metric, ci_mode=ci_mode, ci_bins=ci_bins, engine=engine
            )
            runs.append(run.to_json_dict())
    return {
        "experiment": "illumination",
        "parameters": _params_dict(
            VariantParams(variants[0], spec, t=t, c=c), ci_mode=ci_mode, ci_bins=ci_bins
        ),
        "runs": runs,
    }


# ---------------------------------------------------------------------------
# Report output


def dumps_report(report: dict) -> str:
    """Canonical JSON text: sorted keys, no whitespace, trailing newline."""
    return json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n"


def write_report_json(report: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_report(report))


def write_ar_csv(rows: Iterable[dict], path, columns: Sequence[str]) -> None:
    """Accuracy table with one row per experiment cell."""
    import csv

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(columns))
        for row in rows:
            writer.writerow([row.get(col, "") for col in columns])
