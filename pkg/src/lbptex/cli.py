"""Command-line interface.

Subcommands
-----------
``describe``    histogram feature of one image
``classify``    nearest-reference classification of a manifest
``experiment``  rotation / radius / noise / illumination protocols
``fixtures``    write synthetic datasets with manifests

Exit codes: 0 on success, 2 for configuration or manifest problems, 3 for
corrupt or unreadable data.  All JSON output is canonical (sorted keys,
compact separators), so repeated runs with the same inputs are
byte-identical.
"""

from __future__ import annotations

import argparse
import sys

from . import fixtures as fixture_mod
from ._backend import load_backend
from .descriptors import VARIANTS, VariantParams
from .errors import ConfigError, DataError, LbptexError, ManifestError
from .harness import (
    CI_MODES,
    DEFAULT_METRICS,
    DEFAULT_RADIUS_VARIANTS,
    DEFAULT_VARIANTS,
    classify_records,
    compute_feature,
    ingest_manifest,
    run_illumination_experiment,
    run_noise_experiment,
    run_radius_sweep,
    run_rotation_experiment,
    write_ar_csv,
    write_report_json,
)
from .histograms import write_histogram_csv, write_histogram_json
from .imagecore import SAMPLING_MODES, NeighborhoodSpec, read_image
from .metrics import METRICS


def _add_neighborhood_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--P", type=int, default=8, dest="p", help="ring sample count (default 8)")
    parser.add_argument("--R", type=float, default=1.0, dest="r", help="ring radius (default 1)")
    parser.add_argument(
        "--mode", choices=SAMPLING_MODES, default="bilinear", help="ring sampling mode"
    )
    parser.add_argument("--t", type=float, default=1.0, help="ternary dead-zone half-width (ltp)")
    parser.add_argument("--c", type=float, default=3.0, help="contrast threshold (cen)")


def _add_backend_option(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--backend",
        choices=("compiled", "python"),
        default=None,
        help="force a descriptor engine (default: compiled when available)",
    )


def _variant_params(args) -> VariantParams:
    spec = NeighborhoodSpec(args.p, args.r, args.mode)
    return VariantParams(args.variant, spec, t=args.t, c=args.c)


def _parse_list(text: str, label: str, allowed) -> list[str]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise ConfigError(f"empty {label} list")
    for item in items:
        if item not in allowed:
            raise ConfigError(f"unknown {label} {item!r}; expected one of {tuple(allowed)}")
    return items


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lbptex",
        description="Local binary pattern descriptors, histogram metrics, and texture classification experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_desc = sub.add_parser("describe", help="compute a histogram feature for one image")
    p_desc.add_argument("--variant", choices=VARIANTS, required=True)
    _add_neighborhood_options(p_desc)
    p_desc.add_argument("--in", dest="input", required=True, help="input image (PGM, or PNG with Pillow)")
    p_desc.add_argument("--out", required=True, help="output histogram JSON")
    p_desc.add_argument("--csv", default=None, help="optional per-bin CSV")
    _add_backend_option(p_desc)

    p_cls = sub.add_parser("classify", help="nearest-reference classification of a manifest")
    p_cls.add_argument("--manifest", required=True)
    p_cls.add_argument("--variant", choices=VARIANTS, required=True)
    p_cls.add_argument("--metric", choices=sorted(METRICS), required=True)
    _add_neighborhood_options(p_cls)
    p_cls.add_argument("--ci", choices=CI_MODES, default="none", help="contrast augmentation mode")
    p_cls.add_argument("--ci-bins", type=int, default=8, dest="ci_bins")
    p_cls.add_argument("--out", required=True, help="output report JSON")
    p_cls.add_argument("--csv", default=None, help="optional confusion-matrix CSV")
    _add_backend_option(p_cls)

    p_exp = sub.add_parser("experiment", help="run a full experiment protocol")
    p_exp.add_argument(
        "protocol", choices=("rotation", "radius", "noise", "illumination"), help="experiment type"
    )
    p_exp.add_argument("--manifest", required=True)
    p_exp.add_argument("--variants", default=None, help="comma-separated variant list")
    p_exp.add_argument("--metrics", default=None, help="comma-separated metric list")
    _add_neighborhood_options(p_exp)
    p_exp.add_argument("--radii", default="1,2,3", help="radius sweep values (radius protocol)")
    p_exp.add_argument("--variance", type=float, default=0.06, help="noise variance (noise protocol)")
    p_exp.add_argument("--seed", type=int, default=0, help="noise seed (noise protocol)")
    p_exp.add_argument("--ci", choices=CI_MODES, default="none", help="contrast mode (illumination)")
    p_exp.add_argument("--ci-bins", type=int, default=8, dest="ci_bins")
    p_exp.add_argument("--out", required=True, help="output report JSON")
    p_exp.add_argument("--csv", default=None, help="optional accuracy-table CSV")
    _add_backend_option(p_exp)

    p_fix = sub.add_parser("fixtures", help="write a synthetic dataset with a manifest")
    p_fix.add_argument("--kind", choices=("rotation", "noise", "illumination"), required=True)
    p_fix.add_argument("--out", required=True, help="output directory")
    p_fix.add_argument("--seed", type=int, default=0)
    p_fix.add_argument("--size", type=int, default=64)

    return parser


def _cmd_describe(args) -> int:
    engine = load_backend(args.backend) if args.backend else None
    params = _variant_params(args)
    img = read_image(args.input)
    hist = compute_feature(img, params, engine=engine)
    write_histogram_json(hist, args.out)
    if args.csv:
        write_histogram_csv(hist, args.csv)
    return 0


def _cmd_classify(args) -> int:
    engine = load_backend(args.backend) if args.backend else None
    params = _variant_params(args)
    records = ingest_manifest(args.manifest)
    run = classify_records(
        records, params, args.metric, ci_mode=args.ci, ci_bins=args.ci_bins, engine=engine
    )
    report = {
        "experiment": "classify",
        "parameters": {
            "p": args.p,
            "r": args.r,
            "mode": args.mode,
            "t": args.t,
            "c": args.c,
            "ci_mode": args.ci,
            "ci_bins": args.ci_bins,
        },
        "run": run.to_json_dict(),
    }
    write_report_json(report, args.out)
    if args.csv:
        from .classify import write_confusion_csv

        write_confusion_csv(run.confusion, args.csv)
    return 0


def _cmd_experiment(args) -> int:
    engine = load_backend(args.backend) if args.backend else None
    records = ingest_manifest(args.manifest)
    metrics = (
        _parse_list(args.metrics, "metric", METRICS) if args.metrics else list(DEFAULT_METRICS)
    )
    spec = NeighborhoodSpec(args.p, args.r, args.mode)

    if args.protocol == "rotation":
        variants = (
            _parse_list(args.variants, "variant", VARIANTS)
            if args.variants
            else list(DEFAULT_VARIANTS)
        )
        report = run_rotation_experiment(
            records, variants, metrics, spec, t=args.t, c=args.c, engine=engine
        )
        csv_rows = [
            {"variant": r["variant"], "metric": r["metric"], "accuracy_rate": r["accuracy_rate"]}
            for r in report["runs"]
        ]
        csv_cols = ("variant", "metric", "accuracy_rate")
    elif args.protocol == "radius":
        variants = (
            _parse_list(args.variants, "variant", VARIANTS)
            if args.variants
            else list(DEFAULT_RADIUS_VARIANTS)
        )
        try:
            radii = [float(s) for s in args.radii.split(",") if s.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad --radii value: {args.radii!r}") from exc
        if not radii:
            raise ConfigError("empty --radii list")
        report = run_radius_sweep(
            records, variants, metrics, radii, p=args.p, mode=args.mode, t=args.t, c=args.c, engine=engine
        )
        csv_rows = report["rows"]
        csv_cols = ("r", "variant", "metric", "accuracy_rate")
    elif args.protocol == "noise":
        variants = (
            _parse_list(args.variants, "variant", VARIANTS)
            if args.variants
            else list(DEFAULT_VARIANTS)
        )
        report = run_noise_experiment(
            records,
            variants,
            metrics,
            spec,
            variance=args.variance,
            seed=args.seed,
            t=args.t,
            c=args.c,
            engine=engine,
        )
        csv_rows = report["rows"]
        csv_cols = ("variant", "metric", "accuracy_clean", "accuracy_noisy")
    else:
        variants = (
            _parse_list(args.variants, "variant", VARIANTS)
            if args.variants
            else list(DEFAULT_VARIANTS)
        )
        report = run_illumination_experiment(
            records,
            variants,
            metrics,
            spec,
            ci_mode=args.ci,
            ci_bins=args.ci_bins,
            t=args.t,
            c=args.c,
            engine=engine,
        )
        csv_rows = [
            {"variant": r["variant"], "metric": r["metric"], "accuracy_rate": r["accuracy_rate"]}
            for r in report["runs"]
        ]
        csv_cols = ("variant", "metric", "accuracy_rate")

    write_report_json(report, args.out)
    if args.csv:
        write_ar_csv(csv_rows, args.csv, csv_cols)
    return 0


def _cmd_fixtures(args) -> int:
    makers = {
        "rotation": fixture_mod.make_rotation_dataset,
        "noise": fixture_mod.make_noise_dataset,
        "illumination": fixture_mod.make_illumination_dataset,
    }
    manifest = makers[args.kind](args.out, seed=args.seed, size=args.size)
    print(manifest)
    return 0


_COMMANDS = {
    "describe": _cmd_describe,
    "classify": _cmd_classify,
    "experiment": _cmd_experiment,
    "fixtures": _cmd_fixtures,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ManifestError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except LbptexError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
