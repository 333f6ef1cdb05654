"""Command-line front end: ``posenc analyze | run | reconstruct | list-experiments``.

Exit codes: 0 success, 1 numerical failure, 2 usage or input error,
3 one or more experiment assertions failed.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .embedders import Embedder, Embedding2DScheme, embed_2d_matrix, embed_matrix
from .experiments import (
    EXPERIMENTS,
    SpecError,
    default_jobs,
    load_spec,
    parse_override,
    pixel_coords,
    run,
    tabulated_2d,
    to_pgm,
)
from .learners import DivergenceError, Mlp, TrainConfig, fit_linear_adam, mlp_train
from .signal import (
    SignalFormatError,
    SplitSpec,
    format_csv,
    load_signal_1d,
    load_signal_2d,
    split,
    split_2d,
)
from .spectral import distance_profile, stable_rank_report
from .synthetic import synthetic_image, synthetic_row

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE, EXIT_ASSERT = 0, 1, 2, 3
SEED_ENV = "POSENC_SEED"
NUMERIC_ERRORS = (DivergenceError, np.linalg.LinAlgError, FloatingPointError, ArithmeticError)

log = logging.getLogger("posenc")


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _add_embedder_flags(p: argparse.ArgumentParser, default_kind: str | None = None):
    kinds = ["impulse", "sine", "square", "gaussian", "noise", "rff"]
    p.add_argument("--embedder", choices=kinds, default=default_kind, required=default_kind is None)
    p.add_argument("--sigma", type=float, help="gaussian width or rff frequency std")
    p.add_argument("--freq", type=float, default=1.0, help="sine frequency (cycles per unit)")
    p.add_argument("--period", type=float, default=2.0, help="square-wave period")
    p.add_argument("--embedder-seed", type=int, default=0, help="seed for noise and rff tables")


def _embedder(args) -> Embedder:
    k = args.embedder
    if k in ("gaussian", "rff") and args.sigma is None:
        raise UsageError(f"--sigma is required for the {k} embedder")
    return {
        "impulse": lambda: Embedder.impulse(),
        "sine": lambda: Embedder.sine(args.freq),
        "square": lambda: Embedder.square(args.period),
        "gaussian": lambda: Embedder.gaussian(args.sigma),
        "noise": lambda: Embedder.noise(args.embedder_seed),
        "rff": lambda: Embedder.rff(args.sigma, args.embedder_seed),
    }[k]()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="posenc", description="positional-encoding laboratory")
    parser.add_argument("--version", action="version", version=f"posenc {__version__}")
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="stable rank and distance profile of one embedder")
    _add_embedder_flags(a)
    a.add_argument("--n", type=int, default=512, help="number of embedded points")
    a.add_argument("--d", type=int, default=4096, help="embedding dimension")
    a.add_argument("--csv", type=Path, help="write stable-rank and profile rows here")

    r = sub.add_parser("run", help="run an experiment spec file")
    r.add_argument("spec", type=Path)
    r.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a spec parameter")
    r.add_argument("--paper-scale", action="store_true", help="use the full-size defaults")
    r.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    r.add_argument("--seed", type=int, default=None, help=f"run seed (default ${SEED_ENV} or 0)")
    r.add_argument("--out", type=Path, default=None, help="output directory (default out/<experiment>)")
    r.add_argument("--emit-gnuplot", action="store_true", help="also write a gnuplot script")

    c = sub.add_parser("reconstruct", help="fit one signal or image and write the reconstruction")
    c.add_argument("input", help="CSV/PGM path, or synthetic-row / synthetic-image")
    c.add_argument("--row", type=int, default=None, help="image row to treat as a 1-D signal")
    c.add_argument("--size", type=int, default=256, help="samples (or pixels per side) for synthetic inputs")
    _add_embedder_flags(c, default_kind="gaussian")
    c.add_argument("--d", type=int, default=2048, help="embedding dimension (per axis in 2-D)")
    c.add_argument("--scheme", choices=["separable", "directions", "grid"], default="separable")
    c.add_argument("--learner", choices=["linear", "mlp"], default="linear")
    c.add_argument("--width", type=int, default=256, help="MLP hidden width")
    c.add_argument("--epochs", type=int, default=2000)
    c.add_argument("--lr", type=float, default=1e-4)
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--split", default="even-odd", help="even-odd, stride(k) or all-train")
    c.add_argument("--output", type=Path, default=None, help="reconstruction file (.csv for 1-D, .pgm for 2-D)")

    sub.add_parser("list-experiments", help="list experiment ids")
    return parser


# --- subcommands -------------------------------------------------------------


def cmd_analyze(args) -> int:
    e = _embedder(args)
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    rep = stable_rank_report(e, args.n, args.d)
    print(f"embedder: {e.to_text(args.d)}")
    print(f"matrix: {rep.matrix_shape[0]} x {rep.matrix_shape[1]}")
    print(f"empirical stable rank: {rep.empirical:.6g}")
    print("theoretical stable rank: " + ("n/a" if rep.theoretical is None else f"{rep.theoretical:.6g}"))
    profile = None
    lo, hi = (4 * e.sigma, 1 - 4 * e.sigma) if e.kind == "gaussian" else (0.0, 1.0)
    if hi - lo > 0:
        reach = 6 * e.sigma if e.kind == "gaussian" else 0.25
        deltas = np.linspace(0.0, min(reach, hi - lo), 26)
        profile = distance_profile(e, args.d, lo, deltas)
        mid = len(deltas) // 2
        print(f"distance profile: x0={lo:.4g}, delta 0..{deltas[-1]:.4g}, D({deltas[mid]:.4g})={profile.empirical[mid]:.6g}")
        if profile.analytic is not None:
            print(f"max |empirical - analytic| distance: {profile.sup_error():.3g}")
    else:
        print("distance profile: skipped (sigma too wide for the boundary guard)")
    if args.csv:
        lines = [",".join(rep.csv_row())]
        lines.append(",".join(str(v) for v in rep.csv_row().values()))
        if profile is not None:
            rows = profile.csv_rows()
            lines.append("")
            lines.append(",".join(rows[0]))
            lines += [",".join(str(v) for v in r.values()) for r in rows]
        args.csv.write_text(f"# posenc {__version__} analyze {e.to_text(args.d)} n={args.n}\n" + "\n".join(lines) + "\n")
        print(f"wrote {args.csv}", file=sys.stderr)
    return EXIT_OK


def cmd_run(args) -> int:
    if not args.spec.is_file():
        raise UsageError(f"spec file not found: {args.spec}")
    overrides = dict(parse_override(s) for s in args.set)
    seed = args.seed if args.seed is not None else _default_seed()
    jobs = args.jobs if args.jobs is not None else default_jobs()
    if jobs < 1:
        raise UsageError("--jobs must be >= 1")
    spec = load_spec(args.spec, overrides, seed=seed, paper_scale=args.paper_scale, jobs=jobs)
    log.info("running %s (%s scale, %d jobs)", spec.id, "paper" if spec.paper_scale else "desk", jobs)
    report = run(spec)
    out = args.out if args.out is not None else Path("out") / spec.id
    for path in report.write(out, emit_gnuplot=args.emit_gnuplot):
        print(path)
    for a in report.assertions:
        log.info("%s %s: %s", "pass" if a.passed else "FAIL", a.name, a.detail)
    if report.failed:
        for a in report.failed:
            print(f"assertion failed: {a.name}: {a.detail}", file=sys.stderr)
        return EXIT_ASSERT
    return EXIT_OK


def _load_input(args):
    """Returns ``("1d", Signal1D)`` or ``("2d", Signal2D)``."""
    if args.input == "synthetic-row":
        return "1d", synthetic_row(args.size, args.row or 0)
    if args.input == "synthetic-image":
        return "2d", synthetic_image(args.size)
    path = Path(args.input)
    if not path.is_file():
        raise UsageError(f"input not found: {path}")
    if args.row is not None:
        return "1d", load_signal_1d(path, args.row)
    try:
        return "2d", load_signal_2d(path)
    except SignalFormatError as exc:
        if "1-D" not in str(exc):
            raise
        return "1d", load_signal_1d(path)


def cmd_reconstruct(args) -> int:
    kind, sig = _load_input(args)
    e = _embedder(args)
    seed = args.seed if args.seed is not None else _default_seed()
    cfg = TrainConfig(epochs=args.epochs, learning_rate=args.lr, seed=seed, log_every=args.epochs)
    spec = SplitSpec.parse(args.split)
    header = [f"posenc {__version__} reconstruct {sig.name}", f"embedder {e.to_text(args.d)}", f"learner {args.learner}"]
    if kind == "1d":
        tr, te = split(sig, spec)
        x = embed_matrix(e, sig.coords, args.d).data
        if args.learner == "linear":
            model, trace = fit_linear_adam(x[tr], sig.samples[tr], cfg, x[te], sig.samples[te])
            pred = model.predict(x)
        else:
            m = Mlp.init([args.d, args.width, args.width, args.width, 1], seed=seed)
            trace = mlp_train(m, x[tr], sig.samples[tr], x[te], sig.samples[te], cfg)
            pred = m.forward(x)
        role = np.zeros(len(sig.samples), dtype=int)
        role[tr] = 1
        table = np.column_stack([sig.coords, sig.samples, pred, role])
        out = args.output or Path("reconstruction.csv")
        out.write_text(format_csv(table, header + ["columns: x, target, prediction, is_train"]))
    else:
        xs, ys = pixel_coords(sig.shape)
        scheme = Embedding2DScheme(args.scheme, e, args.d)
        tr, te = split_2d(sig.shape, spec)
        y = sig.grid.ravel()
        if args.learner == "linear":
            x = embed_2d_matrix(scheme, xs, ys)
            model, trace = fit_linear_adam(x[tr], y[tr], cfg, x[te], y[te])
            pred = model.predict(x)
        else:
            x = embed_2d_matrix(scheme, xs, ys) if args.scheme == "grid" else tabulated_2d(scheme, xs, ys)
            m = Mlp.init([scheme.output_dim, args.width, args.width, args.width, 1], seed=seed)
            xt = x[tr] if isinstance(x, np.ndarray) else x.take(tr)
            xe = x[te] if isinstance(x, np.ndarray) else x.take(te)
            trace = mlp_train(m, xt, y[tr], xe, y[te], cfg)
            pred = m.forward(x)
        out = args.output or Path("reconstruction.pgm")
        out.write_bytes(to_pgm(pred.reshape(sig.shape), header))
    print(f"train_psnr: {trace.final_train_psnr:.4f}")
    test = trace.final_test_psnr
    print("test_psnr: " + ("n/a" if test is None else f"{test:.4f}"))
    print(f"wrote {out}", file=sys.stderr)
    return EXIT_OK


def cmd_list(args) -> int:
    width = max(len(k) for k in EXPERIMENTS)
    for key, info in EXPERIMENTS.items():
        print(f"{key:<{width}}  {info.description}")
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "run": cmd_run, "reconstruct": cmd_reconstruct, "list-experiments": cmd_list}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        # divergence is detected and reported explicitly; numpy's overflow warnings add nothing
        with np.errstate(over="ignore", invalid="ignore"):
            return COMMANDS[args.command](args)
    except NUMERIC_ERRORS as exc:
        print(f"posenc: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, SpecError, SignalFormatError, ValueError, IndexError, OSError) as exc:
        print(f"posenc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
