"""Command-line interface.

Three subcommands over the binary feature-map format:

* augment -- read a file, apply one augmentation method batch-by-batch,
  write the result, and print a one-line JSON summary to stdout.
* analyze -- report the correlation/spectral structure of a file's style
  statistics as CSV or JSON, optionally rendering figures alongside.
* harness -- run the multi-domain method comparison from a JSON config
  and write the per-method metric table, optionally with figures.

Exit status is 0 on success and 1 on I/O or validation failure (the
message goes to stderr).  Runs are deterministic given --seed: per-batch
streams are derived from the seed and the batch index, so results do not
depend on scheduling.
"""

import argparse
import json
import os
import sys

import numpy as np

from .analysis import (
    coverage_experiment,
    default_harness_config,
    parse_harness_config,
    spectrum_report,
)
from .augment import AugmentConfig, METHODS, augment_forward
from .featuremap import FeatureMap
from .fmfile import read_feature_map, write_feature_map
from .rng import RngStream
from .stats import correlation_from_covariance, instance_stats, stats_covariance

ANALYZE_EPS = 1e-6


def _fmt(x):
    return repr(float(x))


def _parse_seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(
            f"seed must be an unsigned 64-bit integer, got {value}"
        )
    return value


def cmd_augment(args):
    fm = read_feature_map(args.input)
    cfg = AugmentConfig(
        method=args.method,
        alpha=args.alpha,
        gate_p=args.gate_p,
        eps=args.eps,
        seed=args.seed,
    )
    batch_size = args.batch_size if args.batch_size is not None else fm.B
    if batch_size < 1:
        raise ValueError(f"batch size must be >= 1, got {batch_size}")
    root = RngStream(cfg.seed)
    pieces = []
    gated = 0
    lam_blocks = []
    for i, start in enumerate(range(0, fm.B, batch_size)):
        sub = FeatureMap(fm.data[start : start + batch_size].copy())
        out, aug = augment_forward(sub, cfg, root.child(i))
        pieces.append(out.data)
        if aug.gated:
            gated += 1
        else:
            lam_blocks.append(aug.lambda_used)
    result = FeatureMap(np.concatenate(pieces, axis=0))
    write_feature_map(args.output, result)
    lam_mean = float(np.mean(np.concatenate(lam_blocks))) if lam_blocks else 0.0
    print(
        json.dumps(
            {"batches": len(pieces), "gated": gated, "lambda_mean": lam_mean}
        )
    )
    return 0


def _analyze_payload(fm, stat):
    stats = instance_stats(fm, ANALYZE_EPS)
    matrix = stats.mu if stat == "mu" else stats.sigma
    cov = stats_covariance(matrix)
    corr = correlation_from_covariance(cov)
    report = spectrum_report(cov, source_tag=stat)
    return {
        "stat": stat,
        "B": fm.B,
        "C": fm.C,
        "rank": report.rank,
        "eigenvalues": [float(x) for x in report.eigenvalues],
        "explained_variance_ratio": [
            float(x) for x in report.explained_variance_ratio
        ],
        "covariance": [[float(x) for x in row] for row in cov.cov],
        "correlation": [[float(x) for x in row] for row in corr],
    }, report, corr


def _write_analyze_csv(path, payload):
    lines = [
        f"stat,{payload['stat']}",
        f"B,{payload['B']}",
        f"C,{payload['C']}",
        f"rank,{payload['rank']}",
        "eigenvalues," + ",".join(_fmt(x) for x in payload["eigenvalues"]),
        "explained_variance_ratio,"
        + ",".join(_fmt(x) for x in payload["explained_variance_ratio"]),
        "covariance",
    ]
    lines += [",".join(_fmt(x) for x in row) for row in payload["covariance"]]
    lines.append("correlation")
    lines += [",".join(_fmt(x) for x in row) for row in payload["correlation"]]
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def cmd_analyze(args):
    fm = read_feature_map(args.input)
    payload, report, corr = _analyze_payload(fm, args.stat)
    if args.format == "json":
        with open(args.report, "w") as f:
            json.dump(payload, f, indent=2)
            f.write("\n")
    else:
        _write_analyze_csv(args.report, payload)
    if args.figures is not None:
        from . import plots

        os.makedirs(args.figures, exist_ok=True)
        stem = os.path.splitext(os.path.basename(args.report))[0]
        plots.save_correlation_heatmap(
            corr,
            os.path.join(args.figures, f"{stem}_correlation.png"),
            title=f"{args.stat} correlation (B={fm.B}, C={fm.C})",
        )
        plots.save_spectrum_plot(
            report,
            os.path.join(args.figures, f"{stem}_spectrum.png"),
            title=f"{args.stat} covariance spectrum",
        )
    return 0


def cmd_harness(args):
    if args.config == "default":
        raw = default_harness_config()
    else:
        with open(args.config) as f:
            try:
                raw = json.load(f)
            except json.JSONDecodeError as exc:
                raise ValueError(f"config error: invalid JSON ({exc})") from exc
    sources, target, methods, draws = parse_harness_config(raw)
    rows = coverage_experiment(sources, target, methods, RngStream(args.seed), n_draws=draws)
    header = "method,frechet_to_target,out_of_hull_fraction,correlation_deviation"
    lines = [header] + [
        ",".join(
            [
                r["method"],
                _fmt(r["frechet_to_target"]),
                _fmt(r["out_of_hull_fraction"]),
                _fmt(r["correlation_deviation"]),
            ]
        )
        for r in rows
    ]
    with open(args.report, "w") as f:
        f.write("\n".join(lines) + "\n")
    if args.figures is not None:
        from . import plots

        os.makedirs(args.figures, exist_ok=True)
        stem = os.path.splitext(os.path.basename(args.report))[0]
        plots.save_harness_metrics(
            rows, os.path.join(args.figures, f"{stem}_metrics.png")
        )
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="csu",
        description="Style-statistics augmentation and analysis for feature-map files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("augment", help="augment a feature-map file")
    p.add_argument("--input", required=True, help="input feature-map file")
    p.add_argument("--output", required=True, help="output feature-map file")
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--alpha", type=float, default=0.3, help="Beta intensity parameter")
    p.add_argument("--gate-p", type=float, default=0.5, help="gate probability")
    p.add_argument("--eps", type=float, default=1e-6, help="sigma floor")
    p.add_argument("--seed", type=_parse_seed, default=0, help="unsigned 64-bit seed")
    p.add_argument(
        "--batch-size",
        type=int,
        default=None,
        help="instances per batch (default: whole file as one batch)",
    )
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("analyze", help="report statistics structure of a file")
    p.add_argument("--input", required=True, help="input feature-map file")
    p.add_argument("--report", required=True, help="report file to write")
    p.add_argument("--stat", choices=("mu", "sigma"), default="mu")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument(
        "--figures",
        default=None,
        metavar="DIR",
        help="also render figures (correlation heatmap, spectrum) into DIR",
    )
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("harness", help="compare augmentation methods on synthetic domains")
    p.add_argument(
        "--config",
        required=True,
        help="harness config JSON path, or 'default' for the shipped setup",
    )
    p.add_argument("--report", required=True, help="CSV table to write")
    p.add_argument("--seed", type=_parse_seed, default=0, help="unsigned 64-bit seed")
    p.add_argument(
        "--figures",
        default=None,
        metavar="DIR",
        help="also render the per-method metric bars into DIR",
    )
    p.set_defaults(func=cmd_harness)
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry():  # console-script hook
    sys.exit(main())


if __name__ == "__main__":
    entry()
