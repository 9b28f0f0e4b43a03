"""Command-line front end: ``sphcurves <subcommand> [flags]``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Every run prints a ``# config:`` header with the fully resolved settings.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .circlefit import CircleFitConfig, circle_loss, fit_pga_great_circle, fit_principal_circle
from .dataio import (
    DataError,
    GenSpec,
    export_curve,
    generate,
    load_curve_csv,
    load_catalog,
    report_to_dict,
    save_points,
)
from .evaluation import (
    METHODS,
    MonteCarloConfig,
    PerturbSpec,
    loss_scale,
    method_config,
    random_perturbation_target,
    run_monte_carlo,
    stationarity_gradient,
)
from .geom import GeometryError, unit_to_lonlat
from .pcurve import fit, project_to_curve, sample_circle_vertices

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
LOSS_FOR_METHOD = {"extrinsic": "cosine", "intrinsic": "squared", "median": "absolute"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _nonneg_float(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _add_input(p):
    p.add_argument("--input", required=True, help="input point file")
    p.add_argument("--format", default="usgs-csv", choices=["usgs-csv", "lonlat-csv", "xyz-csv"],
                   help="input format (default: %(default)s)")
    p.add_argument("--min-mag", type=float, default=None,
                   help="usgs-csv only: keep rows with mag >= this (default: keep all)")
    p.add_argument("--lenient", action="store_true", help="skip unparseable rows instead of failing")


def _add_fit(p, method_choices):
    p.add_argument("--T", type=_positive_int, default=100, help="curve vertices (default: %(default)s)")
    p.add_argument("--q", type=_positive_float, default=0.05, help="kernel bandwidth fraction (default: %(default)s)")
    p.add_argument("--threshold", type=_positive_float, default=1e-4,
                   help="relative decrease of the error needed to continue (default: %(default)s)")
    p.add_argument("--max-iter", type=_positive_int, default=50, help="iteration cap (default: %(default)s)")
    p.add_argument("--stop-rule", default="decrease", choices=["decrease", "change"],
                   help="stop on small/negative decrease or only on small change (default: %(default)s)")
    p.add_argument("--open", action="store_true", help="fit an open curve (default: closed)")
    return p


def build_parser():
    parser = _Parser(prog="sphcurves", description="Principal curves on the sphere.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--threads", type=_positive_int, default=1,
                        help="worker threads for Monte Carlo runs (default: %(default)s)")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit a principal curve to a point file")
    _add_input(p)
    p.add_argument("--method", default="extrinsic", choices=list(METHODS),
                   help="centre estimator, or hauberg for the nearest-vertex baseline (default: %(default)s)")
    _add_fit(p, METHODS)
    p.add_argument("--out", required=True, help="output prefix: writes <out>.curve.csv and <out>.report.json")
    p.add_argument("--geojson", action="store_true", help="also write <out>.geojson")

    p = sub.add_parser("simulate", help="generate a noisy circle or wave dataset")
    p.add_argument("--shape", default="circle", choices=["circle", "wave"], help="(default: %(default)s)")
    p.add_argument("--n", type=int, default=100, help="sample size (default: %(default)s)")
    p.add_argument("--sigma", type=_nonneg_float, default=0.07, help="noise scale on the polar angle (default: %(default)s)")
    p.add_argument("--noise", default="gaussian", choices=["gaussian", "cauchy"], help="(default: %(default)s)")
    p.add_argument("--alpha", type=float, default=1 / 3, help="wave amplitude in radians (default: %(default)s)")
    p.add_argument("--freq", type=int, default=4, help="waves per turn (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="(default: %(default)s)")
    p.add_argument("--out", required=True, help="output prefix: writes <out>.xyz.csv")

    p = sub.add_parser("montecarlo", help="repeat simulate + fit and aggregate errors")
    p.add_argument("--shape", default="circle", choices=["circle", "wave"], help="(default: %(default)s)")
    p.add_argument("--n", type=int, default=100, help="(default: %(default)s)")
    p.add_argument("--sigma", type=_nonneg_float, default=0.07, help="(default: %(default)s)")
    p.add_argument("--noise", default="gaussian", choices=["gaussian", "cauchy"], help="(default: %(default)s)")
    p.add_argument("--alpha", type=float, default=1 / 3, help="(default: %(default)s)")
    p.add_argument("--freq", type=int, default=4, help="(default: %(default)s)")
    p.add_argument("--methods", default="extrinsic,intrinsic,hauberg",
                   help="comma-separated subset of " + ",".join(METHODS) + " (default: %(default)s)")
    p.add_argument("--runs", type=_positive_int, default=50, help="(default: %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="(default: %(default)s)")
    _add_fit(p, METHODS)
    p.add_argument("--out", required=True, help="output prefix: writes <out>.report.json")

    p = sub.add_parser("circle", help="fit the principal circle (or the PGA great circle)")
    _add_input(p)
    p.add_argument("--pga", action="store_true", help="fit the tangent-PCA great circle instead")
    p.add_argument("--beta", type=_positive_float, default=0.01, help="initial step size (default: %(default)s)")
    p.add_argument("--circle-threshold", type=_positive_float, default=1e-6, help="(default: %(default)s)")
    p.add_argument("--circle-max-iter", type=_positive_int, default=5000, help="(default: %(default)s)")
    p.add_argument("--out", default=None, help="optional output prefix: writes <out>.circle.json")

    p = sub.add_parser("stationarity", help="finite-difference stationarity checks on a saved curve")
    _add_input(p)
    p.add_argument("--curve", required=True, help="curve csv written by fit/export")
    p.add_argument("--open", action="store_true", help="the saved curve is open")
    p.add_argument("--loss", default="squared", choices=["cosine", "squared", "absolute"], help="(default: %(default)s)")
    p.add_argument("--directions", type=_positive_int, default=20, help="(default: %(default)s)")
    p.add_argument("--eps-fd", type=_positive_float, default=1e-3, help="(default: %(default)s)")
    p.add_argument("--max-disp", type=_positive_float, default=0.1, help="(default: %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="(default: %(default)s)")
    p.add_argument("--out", default=None, help="optional output prefix: writes <out>.stationarity.json")

    p = sub.add_parser("export", help="convert a saved curve to csv, geojson or json")
    p.add_argument("--curve", required=True, help="curve csv written by fit")
    p.add_argument("--open", action="store_true", help="the saved curve is open")
    p.add_argument("--data", default=None, help="optional xyz-csv points whose projection feet are exported")
    p.add_argument("--to", default="geojson", choices=["csv", "geojson"], help="(default: %(default)s)")
    p.add_argument("--out", required=True, help="output file path")
    return parser


def _header(args):
    cfg = {k: v for k, v in sorted(vars(args).items())}
    print("# sphcurves " + __version__)
    print("# config: " + json.dumps(cfg, sort_keys=True))
    return cfg


def _load(args):
    ds = load_catalog(args.input, args.format, min_magnitude=args.min_mag, strict=not args.lenient)
    if len(ds) == 0:
        raise DataError(f"{args.input}: no points after filtering")
    return ds


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=False), encoding="utf-8")


def cmd_fit(args, cfg):
    ds = _load(args)
    if len(ds) < 3:
        raise DataError("need at least 3 points")
    circle = fit_principal_circle(ds.points)
    init = sample_circle_vertices(circle, args.T)
    if args.open:
        from .pcurve import reparameterize_unit_speed

        init = reparameterize_unit_speed(init.vertices, closed=False)
    fc = method_config(args.method, args.T, args.q, args.max_iter, args.threshold, args.stop_rule)
    rep = fit(ds.points, init, fc)
    if rep.error is not None:
        raise FloatingPointError(rep.error)
    export_curve(rep.final_curve, rep.projections, f"{args.out}.curve.csv", "csv")
    metrics = {"method": args.method, "initial_circle": {"center": circle.center.tolist(), "radius": circle.radius}}
    _write_json(f"{args.out}.report.json", report_to_dict(rep, cfg, metrics))
    if args.geojson:
        export_curve(rep.final_curve, rep.projections, f"{args.out}.geojson", "geojson")
    print(f"points={len(ds)} iterations={rep.iterations} converged={rep.converged}")
    print(f"reconstruction_error={rep.delta:.6g} distinct_projections={rep.distinct_projections}/{len(ds)}")


def cmd_simulate(args, cfg):
    spec = GenSpec(shape=args.shape, n=args.n, noise_sigma=args.sigma, noise_kind=args.noise,
                   alpha=args.alpha, freq=args.freq, seed=args.seed)
    ds = generate(spec)
    save_points(ds.points, f"{args.out}.xyz.csv")
    print(f"wrote {len(ds)} points to {args.out}.xyz.csv (clipped={int(ds.clipped.sum())})")


def cmd_montecarlo(args, cfg):
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        raise UsageError(f"unknown methods: {bad}")
    mc = MonteCarloConfig(shape=args.shape, alpha=args.alpha, freq=args.freq, n=args.n,
                          noise_sigma=args.sigma, noise_kind=args.noise, T=args.T, q=args.q,
                          mean_kinds=methods, runs=args.runs, seed=args.seed, threads=args.threads,
                          max_iter=args.max_iter, threshold=args.threshold, stop_rule=args.stop_rule)
    rep = run_monte_carlo(mc)
    rep["cli_config"] = cfg
    _write_json(f"{args.out}.report.json", rep)
    print(f"{'method':<10} {'error mean':>11} {'(sd)':>9} {'distinct':>9} {'(sd)':>7} {'failed':>6}")
    for m, r in rep["methods"].items():
        print(f"{m:<10} {r['error_mean']:>11.4f} {r['error_sd']:>9.4f} {r['distinct_mean']:>9.2f} "
              f"{r['distinct_sd']:>7.2f} {r['failures']:>6d}")


def cmd_circle(args, cfg):
    ds = _load(args)
    if args.pga:
        c = fit_pga_great_circle(ds.points)
        iterations = None
    else:
        cc = CircleFitConfig(step_beta=args.beta, threshold=args.circle_threshold, max_iter=args.circle_max_iter)
        res = fit_principal_circle(ds.points, cc, full_output=True)
        c, iterations = res.circle, res.iterations
    lon, lat = unit_to_lonlat(c.center)
    out = {"center": c.center.tolist(), "center_lonlat": [float(lon), float(lat)], "radius": c.radius,
           "loss": circle_loss(ds.points, c), "iterations": iterations, "config": cfg}
    print(f"center=({c.center[0]:.6f}, {c.center[1]:.6f}, {c.center[2]:.6f}) radius={c.radius:.6f} loss={out['loss']:.6g}")
    if args.out:
        _write_json(f"{args.out}.circle.json", out)


def cmd_stationarity(args, cfg):
    ds = _load(args)
    f = load_curve_csv(args.curve, closed=not args.open)
    rng = np.random.default_rng(args.seed)
    grads = []
    for _ in range(args.directions):
        h = random_perturbation_target(f, rng, args.max_disp)
        grads.append(stationarity_gradient(ds.points, f, PerturbSpec(h), args.loss, args.eps_fd))
    scale = loss_scale(ds.points, f, args.loss)
    g = np.abs(grads)
    out = {"loss": args.loss, "gradients": grads, "scale": scale,
           "max_ratio": float(g.max() / scale), "config": cfg}
    print(f"loss={args.loss} scale={scale:.6g} max|grad|={g.max():.3g} max|grad|/scale={out['max_ratio']:.3g}")
    if args.out:
        _write_json(f"{args.out}.stationarity.json", out)


def cmd_export(args, cfg):
    curve = load_curve_csv(args.curve, closed=not args.open)
    proj = None
    if args.data:
        proj = project_to_curve(load_catalog(args.data, "xyz-csv").points, curve)
    export_curve(curve, proj, args.out, args.to)
    print(f"wrote {args.out}")


COMMANDS = {
    "fit": cmd_fit,
    "simulate": cmd_simulate,
    "montecarlo": cmd_montecarlo,
    "circle": cmd_circle,
    "stationarity": cmd_stationarity,
    "export": cmd_export,
}


def run(argv=None):
    """Run one subcommand and return its exit code."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _header(args)
        COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (GeometryError, FloatingPointError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
