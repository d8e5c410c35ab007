"""Command-line interface.

Subcommands cover the full workflow: ``forward`` (spectrum + asymptotic
residuals), ``sample`` (synthesize measurements), ``invert`` (reconstruct
from a sample CSV), ``optimize-points`` (condition-number design),
``select-basis`` (rank reports, optionally merge), and ``demo`` (one worked
example end to end).

Exit codes: 0 success (a flagged non-convergence still counts), 1 numerical
failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import demos
from .config import ConfigError, load_config, resolve_output_dir
from .design import condition_number, equally_spaced, optimize_points
from .errors import EigenfitError
from .figures import save_reconstruction_figure
from .forward import SampleSet, eigenvalue, sample_eigenfunction
from .inversion import InversionOptions, InversionReport, invert
from .selection import merge_top_functions, rank_reconstructions

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2


def _print_json(obj):
    json.dump(obj, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _apply_option_flags(options: InversionOptions,
                        args) -> InversionOptions:
    return InversionOptions(
        max_iter=args.max_iters if args.max_iters is not None
        else options.max_iter,
        tol=args.tol if args.tol is not None else options.tol,
        svd_cutoff=args.cutoff if args.cutoff is not None
        else options.svd_cutoff,
        ivp_tol=options.ivp_tol)


def cmd_forward(args) -> int:
    config = load_config(args.config)
    out = resolve_output_dir(args.out, config)
    q = config.potential()
    path = out / "eigenvalues.csv"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("k,lambda,asymptotic_residual\n")
        for k in range(1, config.modes + 1):
            pair = eigenvalue(q, k, ivp_tol=config.options.ivp_tol)
            fh.write(f"{k},{pair.lam:.17g},"
                     f"{pair.asymptotic_residual:.17g}\n")
    _print_json({"written": str(path), "modes": config.modes})
    return EXIT_OK


def cmd_sample(args) -> int:
    config = load_config(args.config)
    if args.seed is not None and config.noise is not None:
        config.noise = (config.noise[0], args.seed)
    out = resolve_output_dir(args.out, config)
    q = config.potential()
    points, points_info = demos.place_points(config)
    samples = sample_eigenfunction(q, config.mode, points,
                                   noise=config.noise,
                                   ivp_tol=config.options.ivp_tol)
    path = out / "samples.csv"
    samples.to_csv(path)
    _print_json({"written": str(path), "points": points_info["points"],
                 "lambda": float(samples.lams[0]), "mode": samples.mode})
    return EXIT_OK


def cmd_invert(args) -> int:
    config = load_config(args.config)
    options = _apply_option_flags(config.options, args)
    out = resolve_output_dir(args.out, config)
    samples = SampleSet.from_csv(args.samples)
    if len(samples) != config.basis.n:
        raise ConfigError(
            f"sample CSV has {len(samples)} rows but the basis has "
            f"{config.basis.n} functions")
    q_true = None
    try:
        q_true = config.potential()
    except ConfigError:
        pass
    report = invert(samples, config.basis, options)
    report.save_json(out / "report.json")
    report.reconstruction_csv(out / "reconstruction.csv", q_true=q_true)
    save_reconstruction_figure(out / "figure.svg", report, q_true=q_true)
    _print_json({
        "written": [str(out / name) for name in
                    ("report.json", "reconstruction.csv", "figure.svg")],
        "converged": report.converged,
        "n_iter": report.n_iter,
        "coefficients": [float(c) for c in report.coefficients],
        "n_dropped": report.n_dropped,
    })
    return EXIT_OK


def cmd_optimize_points(args) -> int:
    config = load_config(args.config)
    out = resolve_output_dir(args.out, config)
    n = config.basis.n
    budget = args.budget if args.budget is not None else config.budget
    seed = args.seed if args.seed is not None else config.seed
    pc = optimize_points(n, config.mode, config.basis, budget=budget,
                         seed=seed)
    baseline = equally_spaced(n)
    result = pc.to_json()
    result["baseline_points"] = [float(x) for x in baseline]
    result["baseline_condition_number"] = condition_number(
        baseline, config.mode, config.basis)
    result["budget"] = budget
    result["seed"] = seed
    path = out / "points.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _print_json(result)
    return EXIT_OK


def cmd_select_basis(args) -> int:
    reports = [InversionReport.load_json(p) for p in args.reports]
    # A single report ranks as itself; the comparison op needs two or more.
    ranked = reports if len(reports) == 1 else rank_reconstructions(reports)
    order = {id(r): i for i, r in enumerate(reports)}
    result = {"ranking": [{
        "source": str(args.reports[order[id(rep)]]),
        "l2_norm": rep.potential.l2_norm(),
        "residual_norm": float(np.linalg.norm(rep.sample_residuals)),
        "converged": rep.converged,
    } for rep in ranked]}
    if args.m is not None:
        merged = merge_top_functions(reports, args.m)
        result["merged_basis"] = merged.to_json()
        result["merged_functions"] = [f.label for f in merged.functions]
    out = resolve_output_dir(args.out)
    path = out / "selection.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _print_json(result)
    return EXIT_OK


def cmd_demo(args) -> int:
    out = resolve_output_dir(args.out)
    summary = demos.run_demo(args.example, out, budget=args.budget,
                             seed=args.seed or 0)
    _print_json(summary)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eigenfit",
        description="Recover a 1-D Schrodinger potential from point "
                    "samples of one low-mode eigenfunction.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config_required=True):
        p.add_argument("--config", required=config_required,
                       help="problem configuration JSON")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("forward",
                       help="eigenvalues and asymptotic residuals -> CSV")
    add_common(p)
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("sample", help="synthesize eigenfunction samples")
    add_common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("invert", help="reconstruct from a sample CSV")
    add_common(p)
    p.add_argument("--samples", required=True, help="sample CSV path")
    p.add_argument("--cutoff", type=float, default=None,
                   help="singular value cutoff")
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--tol", type=float, default=None,
                   help="convergence tolerance on max|update|")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("optimize-points",
                       help="choose sample points by condition number")
    add_common(p)
    p.add_argument("--budget", type=int, default=None,
                   help="objective evaluation budget")
    p.set_defaults(func=cmd_optimize_points)

    p = sub.add_parser("select-basis",
                       help="rank reconstruction reports, optionally merge")
    p.add_argument("reports", nargs="+", help="report JSON files")
    p.add_argument("-m", type=int, default=None,
                   help="merge the m strongest functions")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_select_basis)

    p = sub.add_parser("demo", help="reproduce one worked example")
    p.add_argument("example", help="example id (see README)")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EigenfitError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
