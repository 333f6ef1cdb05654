"""Deterministic experiment runners that turn parameter grids into CSV reports.

Each experiment id maps to a runner plus desk-scale and paper-scale defaults.
A run expands its grid into independent cells, evaluates them on a worker
pool, and assembles an :class:`ExperimentReport` whose rows are ordered by
cell index, so output never depends on scheduling. Cell seeds come from
``SeedSequence([run_seed, cell_index])``.

Claims about orderings are encoded as named :class:`Assertion` objects and
evaluated on the report rows.
"""

from __future__ import annotations

import csv
import io
import math
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .embedders import (
    Embedder,
    Embedding2DScheme,
    block_coordinates,
    embed_2d_matrix,
    embed_matrix,
)
from .learners import (
    Mlp,
    TabulatedInput,
    TrainConfig,
    evaluate_psnr,
    fit_linear_adam,
    fit_linear_closed_form,
    mlp_train,
)
from .signal import (
    Signal1D,
    Signal2D,
    SignalFormatError,
    SplitSpec,
    encode_pgm,
    grid_coords,
    load_signal_1d,
    load_signal_2d,
    split,
    split_2d,
)
from .spectral import (
    analysis_grid,
    equivalent_sigma,
    heuristic_sigma,
    heuristic_sigma_2d,
    stable_rank,
    stable_rank_report,
)
from .synthetic import noise_signal, synthetic_image, synthetic_row

SYNTHETIC = "synthetic"


class SpecError(ValueError):
    """A spec file or override that cannot be parsed or names unknown keys."""


# --- spec values --------------------------------------------------------------

_CALL = re.compile(r"^(logspace|linspace|range)\((.*)\)$")


def parse_value(text: str) -> Any:
    """Parse one spec value: number, bool, string, ``[a, b]`` list, ``logspace(a, b, n)``, ``range(n)``."""
    t = text.strip()
    m = _CALL.match(t)
    if m:
        args = [float(a) for a in m.group(2).split(",") if a.strip()]
        if m.group(1) == "range":
            return list(range(*[int(a) for a in args]))
        if len(args) != 3 or args[2] < 1 or args[2] != int(args[2]):
            raise SpecError(f"{m.group(1)} needs (start, stop, count): {t!r}")
        pts = np.linspace(args[0], args[1], int(args[2]))
        return [float(v) for v in (10.0**pts if m.group(1) == "logspace" else pts)]
    if t.startswith("["):
        if not t.endswith("]"):
            raise SpecError(f"unterminated list: {t!r}")
        inner = t[1:-1].strip()
        return [parse_value(p) for p in inner.split(",")] if inner else []
    low = t.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("none", ""):
        return None
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        return t


def format_value(v: Any) -> str:
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(format_value(x) for x in v) + "]"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return "none" if v is None else str(v)


def parse_spec_text(text: str) -> tuple[str, dict]:
    """``key = value`` lines (``#`` comments); the ``experiment`` key names the runner."""
    params: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"line {lineno}: expected key = value, got {raw.strip()!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if not key:
            raise SpecError(f"line {lineno}: empty key")
        params[key] = parse_value(value)
    exp = params.pop("experiment", None)
    if exp is None:
        raise SpecError("spec has no 'experiment = <id>' line")
    return str(exp), params


def parse_override(text: str) -> tuple[str, Any]:
    if "=" not in text:
        raise SpecError(f"override must look like key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), parse_value(value)


# --- spec and report ----------------------------------------------------------


@dataclass(frozen=True)
class ExperimentSpec:
    id: str
    params: dict
    seed: int = 0
    paper_scale: bool = False
    jobs: int = 1

    def __getitem__(self, key):
        return self.params[key]

    def header_lines(self) -> list[str]:
        lines = [f"posenc {__version__}", f"experiment = {self.id}", f"seed = {self.seed}"]
        lines.append(f"scale = {'paper' if self.paper_scale else 'desk'}")
        lines += [f"{k} = {format_value(v)}" for k, v in sorted(self.params.items())]
        return lines


def make_spec(exp_id: str, overrides: dict | None = None, seed: int = 0, paper_scale: bool = False, jobs: int = 1):
    if exp_id not in EXPERIMENTS:
        raise SpecError(f"unknown experiment {exp_id!r}; known: {', '.join(EXPERIMENTS)}")
    info = EXPERIMENTS[exp_id]
    params = dict(info.desk)
    if paper_scale:
        params.update(info.paper)
    for key, value in (overrides or {}).items():
        if key not in params:
            raise SpecError(f"{exp_id} has no parameter {key!r}; known: {', '.join(sorted(params))}")
        params[key] = value
    return ExperimentSpec(exp_id, params, seed, paper_scale, jobs)


def load_spec(path, overrides=None, seed: int = 0, paper_scale: bool = False, jobs: int = 1) -> ExperimentSpec:
    exp_id, params = parse_spec_text(Path(path).read_text())
    params.update(overrides or {})
    return make_spec(exp_id, params, seed, paper_scale, jobs)


@dataclass(frozen=True)
class Assertion:
    name: str
    passed: bool
    detail: str

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))


def aggregate(rows: list[dict], group_by: list[str], metrics: list[str]) -> list[dict]:
    """Mean and population std of ``metrics`` over rows sharing ``group_by`` values."""
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        groups.setdefault(tuple(r[k] for k in group_by), []).append(r)
    out = []
    for key, members in groups.items():
        agg = dict(zip(group_by, key))
        agg["count"] = len(members)
        for m in metrics:
            vals = np.array([float(r[m]) for r in members if r[m] != ""])
            agg[f"{m}_mean"] = float(vals.mean()) if vals.size else ""
            agg[f"{m}_std"] = float(vals.std()) if vals.size else ""
        out.append(agg)
    return out


def _csv_text(rows: list[dict], columns: list[str], header: list[str]) -> str:
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c, "")) for c in columns])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    return v


@dataclass
class ExperimentReport:
    spec: ExperimentSpec
    columns: list[str]
    rows: list[dict]
    group_by: list[str]
    metrics: list[str]
    assertions: list[Assertion] = field(default_factory=list)
    artifacts: dict[str, str | bytes] = field(default_factory=dict)
    aggregates: list[dict] = field(default_factory=list)
    plot: tuple[str, list[str], bool] | None = None  # x column, y columns, log-x

    def __post_init__(self):
        if not self.aggregates:
            self.aggregates = aggregate(self.rows, self.group_by, self.metrics)

    @property
    def failed(self) -> list[Assertion]:
        return [a for a in self.assertions if not a.passed]

    def to_csv(self) -> str:
        return _csv_text(self.rows, self.columns, self.spec.header_lines())

    def aggregates_csv(self) -> str:
        cols = self.group_by + ["count"] + [f"{m}_{s}" for m in self.metrics for s in ("mean", "std")]
        return _csv_text(self.aggregates, cols, self.spec.header_lines())

    def assertions_csv(self) -> str:
        rows = [dict(name=a.name, passed=a.passed, detail=a.detail) for a in self.assertions]
        return _csv_text(rows, ["name", "passed", "detail"], self.spec.header_lines())

    def gnuplot_script(self, csv_name: str) -> str:
        if self.plot is None:
            return ""
        x, ys, logx = self.plot
        cols = {c: i + 1 for i, c in enumerate(self.columns)}
        lines = ["set datafile separator ','", "set key outside", f"set xlabel '{x}'"]
        if logx:
            lines.append("set logscale x")
        plots = [f"'{csv_name}' using {cols[x]}:{cols[y]} skip 0 title '{y}' with points" for y in ys]
        lines.append("plot " + ", ".join(plots))
        return "\n".join(lines) + "\n"

    def write(self, outdir, emit_gnuplot: bool = False) -> list[Path]:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        stem = self.spec.id
        files = {
            f"{stem}.csv": self.to_csv(),
            f"{stem}.summary.csv": self.aggregates_csv(),
            f"{stem}.assertions.csv": self.assertions_csv(),
        }
        for name, content in self.artifacts.items():
            files[f"{stem}.{name}"] = content
        if emit_gnuplot and self.plot is not None:
            files[f"{stem}.gp"] = self.gnuplot_script(f"{stem}.csv")
        paths = []
        for name, content in files.items():
            p = out / name
            if isinstance(content, bytes):
                p.write_bytes(content)
            else:
                p.write_text(content)
            paths.append(p)
        return paths


# --- execution ----------------------------------------------------------------


def cell_seed(run_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([run_seed, index]).generate_state(1)[0])


def _call(job):
    fn, kwargs = job
    return fn(**kwargs)


def execute(cells: list[tuple[Callable, dict]], jobs: int = 1) -> list:
    """Evaluate ``fn(**kwargs)`` per cell; results in cell order."""
    if jobs <= 1 or len(cells) <= 1:
        return [_call(c) for c in cells]
    with ProcessPoolExecutor(max_workers=min(jobs, len(cells))) as pool:
        return list(pool.map(_call, cells))


def default_jobs() -> int:
    return os.cpu_count() or 1


# --- signals ------------------------------------------------------------------


def signal_rows(params: dict, n: int, count: int | None = None) -> list[Signal1D]:
    """``count`` target rows of length ``n`` from the synthetic scene or a signal file."""
    count = params["rows"] if count is None else count
    source = params["signal"]
    if source == SYNTHETIC:
        if count > 10:
            raise SpecError("the synthetic scene provides 10 rows")
        return [synthetic_row(n, r, seed=params["signal_seed"]) for r in range(count)]
    try:
        img = load_signal_2d(source)
    except SignalFormatError:
        return [_crop(load_signal_1d(source), n)]
    if count > img.shape[0]:
        raise SpecError(f"{source} has {img.shape[0]} rows, {count} requested")
    picks = np.sort(np.random.default_rng(params["signal_seed"]).choice(img.shape[0], count, replace=False))
    return [_crop(img.row(int(r)), n) for r in picks]


def _crop(sig: Signal1D, n: int) -> Signal1D:
    if n is None or n >= len(sig.samples):
        return sig
    return Signal1D.from_values(sig.samples[:n], name=f"{sig.name}[:{n}]")


def signal_image(params: dict, size: int) -> Signal2D:
    if params["signal"] == SYNTHETIC:
        return synthetic_image(size, seed=params["signal_seed"])
    return load_signal_2d(params["signal"])


def _linear_run(e: Embedder, sig: Signal1D, d: int, cfg: TrainConfig, init: str, split_spec: str):
    tr, te = split(sig, SplitSpec.parse(split_spec))
    x = embed_matrix(e, sig.coords, d).data
    model, trace = fit_linear_adam(x[tr], sig.samples[tr], cfg, x[te], sig.samples[te], init=init)
    return model, trace, x[tr]


# --- stable-rank-curves ---------------------------------------------------------


def _cell_stable_rank(kind, n, d, sigma, seed, freq, period, matched_sigma_g):
    e = _make_embedder(kind, sigma, seed, freq, period)
    rep = stable_rank_report(e, n, d, analysis_grid(n))
    return dict(
        embedder=kind,
        N=n,
        d=d,
        sigma="" if sigma is None else sigma,
        seed="" if kind != "rff" else seed,
        matched_sigma_g=matched_sigma_g,
        empirical_sr=rep.empirical,
        theoretical_sr="" if rep.theoretical is None else rep.theoretical,
    )


def _make_embedder(kind, sigma=None, seed=0, freq=1.0, period=2.0) -> Embedder:
    if kind == "gaussian":
        return Embedder.gaussian(sigma)
    if kind == "rff":
        return Embedder.rff(sigma, seed)
    if kind == "impulse":
        return Embedder.impulse()
    if kind == "sine":
        return Embedder.sine(freq)
    if kind == "square":
        return Embedder.square(period)
    if kind == "noise":
        return Embedder.noise(seed)
    raise SpecError(f"unknown embedder kind {kind!r}")


def run_stable_rank_curves(spec: ExperimentSpec) -> ExperimentReport:
    p = spec.params
    cells = []
    for s in p["gaussian_sigmas"]:
        cells.append(dict(kind="gaussian", n=p["gaussian_n"], d=p["d"], sigma=s, seed=0))
    for kind in p["catalog_kinds"]:
        for n in p["catalog_n"]:
            cells.append(dict(kind=kind, n=n, d=n, sigma=None, seed=0))
    for sg in p["rff_sigma_g"]:
        cells.append(dict(kind="gaussian", n=p["gaussian_n"], d=p["d"], sigma=sg, seed=0, matched_sigma_g=sg))
        for seed in p["rff_seeds"]:
            cells.append(
                dict(kind="rff", n=p["gaussian_n"], d=p["d"], sigma=equivalent_sigma(sg), seed=seed, matched_sigma_g=sg)
            )
    jobs = []
    for c in cells:
        c.setdefault("matched_sigma_g", "")
        jobs.append((_cell_stable_rank, dict(c, freq=p["sine_freq"], period=p["square_period"])))
    rows = execute(jobs, spec.jobs)

    checks = []
    gauss = [r for r in rows if r["embedder"] == "gaussian" and r["matched_sigma_g"] == ""]
    resolved = [r for r in gauss if r["d"] >= 10.0 / r["sigma"]]
    worst = max((abs(r["empirical_sr"] / r["theoretical_sr"] - 1) for r in resolved), default=0.0)
    checks.append(
        Assertion("gaussian-law-within-10pct", worst <= 0.10, f"worst relative error {worst:.4f} over {len(resolved)} σ with d ≥ 10/σ")
    )
    by_kind = {k: {r["N"]: r["empirical_sr"] for r in rows if r["embedder"] == k} for k in p["catalog_kinds"]}
    if "impulse" in by_kind:
        err = max(abs(v - n) for n, v in by_kind["impulse"].items())
        checks.append(Assertion("impulse-sr-equals-n", err <= 1e-9 * max(by_kind["impulse"]), f"max |SR-N| = {err:.3g}"))
    if "sine" in by_kind:
        top = max(by_kind["sine"].values())
        checks.append(Assertion("sine-sr-at-most-2.05", top <= 2.05, f"max sine SR {top:.4f}"))
    if "sine" in by_kind and "square" in by_kind:
        gaps = [abs(by_kind["square"][n] / by_kind["sine"][n] - 1) for n in by_kind["sine"] if n <= 512]
        checks.append(
            Assertion("square-matches-sine-within-10pct", max(gaps) <= 0.10, f"max relative gap {max(gaps):.4f} for N ≤ 512")
        )
    for sg in p["rff_sigma_g"]:
        g = next(r["empirical_sr"] for r in rows if r["embedder"] == "gaussian" and r["matched_sigma_g"] == sg)
        rff = np.array([r["empirical_sr"] for r in rows if r["embedder"] == "rff" and r["matched_sigma_g"] == sg])
        ratio = rff.mean() / g
        checks.append(
            Assertion(f"rff-matches-gaussian[σg={sg:g}]", abs(ratio - 1) <= 0.15, f"RFF mean {rff.mean():.3f} vs Gaussian {g:.3f}")
        )
        const = rff / equivalent_sigma(sg)
        spread = float(np.max(np.abs(const / const.mean() - 1)))
        checks.append(
            Assertion(
                f"rff-constant-stable[σg={sg:g}]",
                spread <= 0.10,
                f"SR/σf = {const.mean():.4f} (closed form {math.sqrt(2 * math.pi):.4f}), max seed deviation {spread:.4f}",
            )
        )
    cols = ["embedder", "N", "d", "sigma", "seed", "matched_sigma_g", "empirical_sr", "theoretical_sr"]
    return ExperimentReport(
        spec, cols, rows, ["embedder", "N", "d", "sigma", "matched_sigma_g"], ["empirical_sr"], checks, plot=("sigma", ["empirical_sr", "theoretical_sr"], True)
    )


# --- gauss-vs-rff-variance ------------------------------------------------------


def _cell_variance(kind, d, sigma, seed, init_seed, sig, epochs, lr, init, split_spec):
    e = Embedder.gaussian(sigma) if kind == "gaussian" else Embedder.rff(sigma, seed)
    cfg = TrainConfig(epochs=epochs, learning_rate=lr, seed=init_seed, log_every=epochs)
    _, trace, _ = _linear_run(e, sig, d, cfg, init, split_spec)
    return dict(
        embedder=kind, d=d, sigma=sigma, seed=seed, train_psnr=trace.final_train_psnr, test_psnr=trace.final_test_psnr
    )


def run_gauss_vs_rff_variance(spec: ExperimentSpec) -> ExperimentReport:
    p = spec.params
    sig = signal_rows(p, p["n"], 1)[0]
    sf = equivalent_sigma(p["sigma_g"])
    jobs = []
    for d in p["dims"]:
        for seed in p["seeds"]:
            init_seed = cell_seed(spec.seed, seed)
            common = dict(d=d, seed=seed, init_seed=init_seed, sig=sig, epochs=p["epochs"], lr=p["learning_rate"])
            common.update(init=p["init"], split_spec=p["split"])
            jobs.append((_cell_variance, dict(common, kind="gaussian", sigma=p["sigma_g"])))
            jobs.append((_cell_variance, dict(common, kind="rff", sigma=sf)))
    rows = execute(jobs, spec.jobs)
    rep = ExperimentReport(
        spec,
        ["embedder", "d", "sigma", "seed", "train_psnr", "test_psnr"],
        rows,
        ["embedder", "d"],
        ["train_psnr", "test_psnr"],
        plot=("d", ["test_psnr"], True),
    )
    std = {(a["embedder"], a["d"]): a["test_psnr_std"] for a in rep.aggregates}
    for d in p["dims"]:
        if d <= 64:
            g, r = std[("gaussian", d)], std[("rff", d)]
            rep.assertions.append(
                Assertion(f"rff-std-exceeds-2x-gaussian[d={d}]", r >= 2 * g, f"std RFF {r:.4f} dB vs Gaussian {g:.4f} dB")
            )
    lo, hi = min(p["dims"]), max(p["dims"])
    if lo != hi:
        a, b = std[("rff", lo)], std[("rff", hi)]
        rep.assertions.append(Assertion("rff-std-shrinks-with-d", b < a, f"std at d={lo}: {a:.4f}, at d={hi}: {b:.4f}"))
    return rep


# --- embedder-performance --------------------------------------------------------


def _resolve_sigma(value, n_train: int) -> float:
    if value == "auto":
        return math.sqrt(10.0) * heuristic_sigma(n_train)
    if value == "heuristic":
        return heuristic_sigma(n_train)
    return float(value)


def _cell_performance(kind, n, row, sig, d, gaussian_sigma, freq, period, seed, epochs, lr, split_spec):
    sigma = None
    if kind == "gaussian":
        sigma = _resolve_sigma(gaussian_sigma, n)
    elif kind == "rff":
        sigma = equivalent_sigma(_resolve_sigma(gaussian_sigma, n))
    e = _make_embedder(kind, sigma, seed, freq, period)
    cfg = TrainConfig(epochs=epochs, learning_rate=lr, seed=seed, log_every=epochs)
    _, trace, x_train = _linear_run(e, sig, d, cfg, "zeros", split_spec)
    return dict(
        embedder=kind,
        N=n,
        row=row,
        sigma="" if sigma is None else sigma,
        train_psnr=trace.final_train_psnr,
        test_psnr=trace.final_test_psnr,
        embedding_sr=stable_rank(x_train),
    )


def run_embedder_performance(spec: ExperimentSpec) -> ExperimentReport:
    p = spec.params
    jobs = []
    idx = 0
    for n in p["n_values"]:
        sigs = signal_rows(p, 2 * n)
        for kind in p["kinds"]:
            for row, sig in enumerate(sigs):
                jobs.append(
                    (
                        _cell_performance,
                        dict(
                            kind=kind, n=n, row=row, sig=sig, d=p["d"], gaussian_sigma=p["gaussian_sigma"],
                            freq=p["sine_freq"], period=p["square_period"], seed=cell_seed(spec.seed, idx),
                            epochs=p["epochs"], lr=p["learning_rate"], split_spec=p["split"],
                        ),
                    )
                )
                idx += 1
    rows = execute(jobs, spec.jobs)
    rep = ExperimentReport(
        spec,
        ["embedder", "N", "row", "sigma", "train_psnr", "test_psnr", "embedding_sr"],
        rows,
        ["embedder", "N"],
        ["train_psnr", "test_psnr", "embedding_sr"],
        plot=("N", ["train_psnr", "test_psnr"], True),
    )
    mean = {(a["embedder"], a["N"]): a for a in rep.aggregates}
    kinds = set(p["kinds"])

    def ordered(name, pairs):
        bad = [f"N={n}: {lhs:.2f} vs {rhs:.2f}" for n, lhs, rhs in pairs if not lhs > rhs]
        rep.assertions.append(Assertion(name, not bad, "; ".join(bad) if bad else f"holds at {len(pairs)} N"))

    def m(kind, n, metric):
        return mean[(kind, n)][f"{metric}_mean"]

    ns = p["n_values"]
    for kind in ("impulse", "noise"):
        if kind in kinds:
            ordered(f"{kind}-train-exceeds-test", [(n, m(kind, n, "train_psnr"), m(kind, n, "test_psnr")) for n in ns])
            if "gaussian" in kinds:
                ordered(f"gaussian-test-exceeds-{kind}", [(n, m("gaussian", n, "test_psnr"), m(kind, n, "test_psnr")) for n in ns])
    for kind in ("sine", "square"):
        if kind in kinds and "gaussian" in kinds:
            ordered(f"gaussian-train-exceeds-{kind}", [(n, m("gaussian", n, "train_psnr"), m(kind, n, "train_psnr")) for n in ns])
            ordered(f"gaussian-test-exceeds-{kind}", [(n, m("gaussian", n, "test_psnr"), m(kind, n, "test_psnr")) for n in ns])
    return rep


# --- sigma-sweep -----------------------------------------------------------------


def _cell_sweep(n, sigma, row, sig, d, epochs, lr, split_spec, seed):
    cfg = TrainConfig(epochs=epochs, learning_rate=lr, seed=seed, log_every=epochs)
    _, trace, _ = _linear_run(Embedder.gaussian(sigma), sig, d, cfg, "zeros", split_spec)
    return dict(N=n, sigma=sigma, row=row, train_psnr=trace.final_train_psnr, test_psnr=trace.final_test_psnr)


def peak_sigma(sigmas, values, tol: float = 1e-9) -> float:
    """σ maximizing ``values``; ties (e.g. at the PSNR cap) resolve to their geometric centre."""
    v = np.asarray(values, dtype=np.float64)
    s = np.asarray(sigmas, dtype=np.float64)
    top = s[v >= v.max() - tol]
    return float(math.sqrt(top.min() * top.max()))


def keypoints(n: int) -> dict[str, float]:
    h = heuristic_sigma(n)
    return {"half_spacing": 1.0 / (2 * n), "heuristic": h, "ten_heuristic": 10 * h}


def run_sigma_sweep(spec: ExperimentSpec) -> ExperimentReport:
    p = spec.params
    jobs, kp_jobs = [], []
    idx = 0
    for n in p["n_values"]:
        sigs = signal_rows(p, 2 * n)
        for row, sig in enumerate(sigs):
            common = dict(n=n, row=row, sig=sig, d=p["d"], epochs=p["epochs"], lr=p["learning_rate"], split_spec=p["split"])
            for s in p["sigmas"]:
                jobs.append((_cell_sweep, dict(common, sigma=s, seed=cell_seed(spec.seed, idx))))
                idx += 1
            for s in keypoints(n).values():
                kp_jobs.append((_cell_sweep, dict(common, sigma=s, seed=cell_seed(spec.seed, idx))))
                idx += 1
    results = execute(jobs + kp_jobs, spec.jobs)
    rows, kp_rows = results[: len(jobs)], results[len(jobs) :]
    rep = ExperimentReport(
        spec,
        ["N", "sigma", "row", "train_psnr", "test_psnr"],
        rows,
        ["N", "sigma"],
        ["train_psnr", "test_psnr"],
        plot=("sigma", ["train_psnr", "test_psnr"], True),
    )
    kp_table = []
    for n in p["n_values"]:
        agg = [a for a in rep.aggregates if a["N"] == n]
        sig_grid = [a["sigma"] for a in agg]
        train = [a["train_psnr_mean"] for a in agg]
        test = [a["test_psnr_mean"] for a in agg]
        star = peak_sigma(sig_grid, train)
        kp = keypoints(n)
        at = {}
        for name, s in kp.items():
            vals = [r for r in kp_rows if r["N"] == n and r["sigma"] == s]
            at[name] = (float(np.mean([r["train_psnr"] for r in vals])), float(np.mean([r["test_psnr"] for r in vals])))
        for name, s in kp.items():
            kp_table.append(dict(N=n, keypoint=name, sigma=s, train_psnr=at[name][0], test_psnr=at[name][1]))
        kp_table.append(dict(N=n, keypoint="train_peak", sigma=star, train_psnr=max(train), test_psnr=""))
        lo, hi = 1.0 / (6 * n), 3.0 / (2 * n)
        rep.assertions.append(
            Assertion(f"train-peak-near-half-spacing[N={n}]", lo <= star <= hi, f"σ* = {star:.4g}, window [{lo:.4g}, {hi:.4g}]")
        )
        big = [a["test_psnr_mean"] for a in agg if abs(a["sigma"] - 0.1) < 1e-12]
        if big:
            margin = at["heuristic"][1] - big[0]
            rep.assertions.append(
                Assertion(f"test-drops-at-0.1[N={n}]", margin >= 3.0, f"test(σh) − test(0.1) = {margin:.2f} dB")
            )
        rep.assertions.append(
            Assertion(f"test-low-at-smallest-σ[N={n}]", test[0] < max(test), f"test({sig_grid[0]:.3g}) = {test[0]:.2f}, best {max(test):.2f}")
        )
    rep.artifacts["keypoints.csv"] = _csv_text(
        kp_table, ["N", "keypoint", "sigma", "train_psnr", "test_psnr"], spec.header_lines()
    )
    return rep


# --- mlp-rank-tracking -----------------------------------------------------------


def _mlp_input(kind, coords, d, sigma_g):
    if kind == "none":
        return np.asarray(coords, dtype=np.float64)[:, None]
    e = {
        "gaussian": Embedder.gaussian(sigma_g),
        "rff": Embedder.rff(equivalent_sigma(sigma_g), 0),
        "sine": Embedder.sine(),
    }[kind]
    return embed_matrix(e, coords, d).data


def _cell_rank_tracking(inp, target, row, sig, d, sigma_g, width, epochs, lr_raw, lr_embedded, log_every, rank_every, seed, split_spec):
    tr, te = split(sig, SplitSpec.parse(split_spec))
    x = _mlp_input(inp, sig.coords, d, sigma_g)
    m = Mlp.init([x.shape[1], width, width, width, 1], seed=seed)
    lr = lr_raw if inp == "none" else lr_embedded
    cfg = TrainConfig(epochs=epochs, learning_rate=lr, seed=seed, log_every=log_every, track_layer_ranks_every=rank_every)
    trace = mlp_train(m, x[tr], sig.samples[tr], x[te], sig.samples[te], cfg)
    ranked = [(e, r) for e, r in zip(trace.epochs, trace.layer_ranks) if r is not None]
    r0, r1 = ranked[0][1], ranked[-1][1]
    c0, c1 = float(np.mean(r0)), float(np.mean(r1))
    change = max(c1 / c0, c0 / c1) if c0 > 0 and c1 > 0 else float("inf")
    summary = dict(
        input=inp, target=target, row=row, train_psnr=trace.final_train_psnr, test_psnr=trace.final_test_psnr,
        hidden_sr_start=c0, hidden_sr_end=c1, hidden_sr_change=change,
    )
    curve = [
        dict(input=inp, target=target, row=row, epoch=e, train_psnr=a, test_psnr=b, **{f"sr_layer{k + 1}": v for k, v in enumerate(r)})
        for e, a, b, r in zip(trace.epochs, trace.train_psnr, trace.test_psnr, trace.layer_ranks)
        if r is not None
    ]
    return summary, curve


def run_mlp_rank_tracking(spec: ExperimentSpec) -> ExperimentReport:
    p = spec.params
    targets = [("real", s) for s in signal_rows(p, p["n"])]
    targets += [("noise", noise_signal(p["n"], seed=r)) for r in range(p["noise_rows"])]
    jobs = []
    idx = 0
    for inp in p["inputs"]:
        row_counter: dict[str, int] = {}
        for kind, sig in targets:
            row = row_counter.get(kind, 0)
            row_counter[kind] = row + 1
            jobs.append(
                (
                    _cell_rank_tracking,
                    dict(
                        inp=inp, target=kind, row=row, sig=sig, d=p["d"], sigma_g=p["sigma_g"], width=p["width"],
                        epochs=p["epochs"], lr_raw=p["lr_raw"], lr_embedded=p["lr_embedded"], log_every=p["log_every"],
                        rank_every=p["rank_every"], seed=cell_seed(spec.seed, idx), split_spec=p["split"],
                    ),
                )
            )
            idx += 1
    results = execute(jobs, spec.jobs)
    rows = [r[0] for r in results]
    curves = [c for r in results for c in r[1]]
    rep = ExperimentReport(
        spec,
        ["input", "target", "row", "train_psnr", "test_psnr", "hidden_sr_start", "hidden_sr_end", "hidden_sr_change"],
        rows,
        ["input", "target"],
        ["train_psnr", "test_psnr", "hidden_sr_start", "hidden_sr_end", "hidden_sr_change"],
    )
    layer_cols = sorted({k for c in curves for k in c if k.startswith("sr_layer")})
    curve_cols = ["input", "target", "row", "epoch", "train_psnr", "test_psnr"] + layer_cols
    rep.artifacts["curves.csv"] = _csv_text(curves, curve_cols, spec.header_lines())
    agg = {(a["input"], a["target"]): a for a in rep.aggregates}
    inputs = set(p["inputs"])
    if "none" in inputs and ("none", "real") in agg:
        a = agg[("none", "real")]
        rep.assertions.append(
            Assertion(
                "raw-hidden-rank-rises",
                a["hidden_sr_end_mean"] > a["hidden_sr_start_mean"],
                f"mean hidden SR {a['hidden_sr_start_mean']:.3f} → {a['hidden_sr_end_mean']:.3f}",
            )
        )
        for inp in ("gaussian", "rff"):
            if inp in inputs:
                b = agg[(inp, "real")]
                rep.assertions.append(
                    Assertion(
                        f"{inp}-hidden-rank-flatter-than-raw",
                        b["hidden_sr_change_mean"] < a["hidden_sr_change_mean"],
                        f"change ratio {b['hidden_sr_change_mean']:.3f} vs raw {a['hidden_sr_change_mean']:.3f}",
                    )
                )
                gap = b["train_psnr_mean"] - a["train_psnr_mean"]
                rep.assertions.append(
                    Assertion(f"{inp}-train-5db-above-raw", gap >= 5.0, f"train PSNR gap {gap:.2f} dB")
                )
    for inp in p["inputs"]:
        if (inp, "real") in agg and (inp, "noise") in agg:
            real, noise = agg[(inp, "real")]["train_psnr_mean"], agg[(inp, "noise")]["train_psnr_mean"]
            rep.assertions.append(
                Assertion(f"noise-target-trains-worse[{inp}]", noise < real, f"noise {noise:.2f} dB vs real {real:.2f} dB")
            )
    return rep


# --- reconstruct-1d ----------------------------------------------------------------


def _cell_reconstruct_1d(row, sig, sigma, d, epochs, lr, split_spec, dense_points, outside, seed):
    e = Embedder.gaussian(sigma)
    cfg = TrainConfig(epochs=epochs, learning_rate=lr, seed=seed, log_every=epochs)
    model, trace, _ = _linear_run(e, sig, d, cfg, "zeros", split_spec)
    xs = np.linspace(-outside, 1.0 + outside, dense_points)
    pred = model.predict(embed_matrix(e, xs, d, allow_outside=True).data)
    far = np.abs(xs - np.clip(xs, 0.0, 1.0)) >= outside - 1e-12
    summary = dict(
        row=row, sigma=sigma, train_psnr=trace.final_train_psnr, test_psnr=trace.final_test_psnr,
        bias=model.b, outside_max_dev=float(np.max(np.abs(pred[far] - model.b))) if far.any() else 0.0,
    )
    curve = [dict(row=row, sigma=sigma, x=float(x), prediction=float(v)) for x, v in zip(xs, pred)]
    return summary, curve


def run_reconstruct_1d(spec: ExperimentSpec) -> ExperimentReport:
    p = spec.params
    sigs = signal_rows(p, p["n"])
    jobs = []
    idx = 0
    for row, sig in enumerate(sigs):
        for s in p["sigmas"]:
            jobs.append(
                (
                    _cell_reconstruct_1d,
                    dict(
                        row=row, sig=sig, sigma=s, d=p["d"], epochs=p["epochs"], lr=p["learning_rate"], split_spec=p["split"],
                        dense_points=p["dense_points"], outside=p["outside"], seed=cell_seed(spec.seed, idx),
                    ),
                )
            )
            idx += 1
    results = execute(jobs, spec.jobs)
    rows = [r[0] for r in results]
    rep = ExperimentReport(
        spec,
        ["row", "sigma", "train_psnr", "test_psnr", "bias", "outside_max_dev"],
        rows,
        ["sigma"],
        ["train_psnr", "test_psnr"],
        plot=("sigma", ["train_psnr", "test_psnr"], True),
    )
    target_rows = [dict(row=r, x=float(x), target=float(v)) for r, s in enumerate(sigs) for x, v in zip(s.coords, s.samples)]
    rep.artifacts["targets.csv"] = _csv_text(target_rows, ["row", "x", "target"], spec.header_lines())
    rep.artifacts["curves.csv"] = _csv_text(
        [c for r in results for c in r[1]], ["row", "sigma", "x", "prediction"], spec.header_lines()
    )
    sig_sorted = sorted(p["sigmas"])
    if len(sig_sorted) == 3:
        small, mid, large = sig_sorted
        mean = {a["sigma"]: a for a in rep.aggregates}
        tm = {s: mean[s]["test_psnr_mean"] for s in sig_sorted}
        rep.assertions.append(
            Assertion(
                "mid-sigma-best-test",
                tm[mid] > tm[small] and tm[mid] > tm[large],
                f"mean test PSNR {small:g}: {tm[small]:.2f}, {mid:g}: {tm[mid]:.2f}, {large:g}: {tm[large]:.2f}",
            )
        )
        per_row = [
            r for r in range(len(sigs))
            if _row_val(rows, r, mid, "test_psnr") > max(_row_val(rows, r, small, "test_psnr"), _row_val(rows, r, large, "test_psnr"))
        ]
        rep.assertions.append(
            Assertion("mid-sigma-best-test-every-row", len(per_row) == len(sigs), f"{len(per_row)}/{len(sigs)} rows")
        )
        a, b = mean[small]["train_psnr_mean"], mean[large]["train_psnr_mean"]
        rep.assertions.append(
            Assertion("small-sigma-memorizes-better", a > b, f"train PSNR {small:g}: {a:.2f}, {large:g}: {b:.2f}")
        )
    dev = max(r["outside_max_dev"] for r in rows)
    rep.assertions.append(Assertion("outside-range-returns-bias", dev <= 1e-6, f"max |prediction − b| = {dev:.3g}"))
    return rep


def _row_val(rows, row, sigma, key):
    return next(r[key] for r in rows if r["row"] == row and r["sigma"] == sigma)


# --- 2-D helpers ------------------------------------------------------------------


def pixel_coords(shape) -> tuple[np.ndarray, np.ndarray]:
    """Flat row-major ``(x, y)`` for every pixel: x follows columns, y follows rows."""
    h, w = shape
    yy, xx = np.meshgrid(grid_coords(h), grid_coords(w), indexing="ij")
    return xx.ravel(), yy.ravel()


def tabulated_2d(scheme: Embedding2DScheme, xs, ys) -> TabulatedInput:
    """Block-structured 2-D embedding with one table row per distinct block coordinate."""
    tables, indices = [], []
    for c in block_coordinates(scheme, xs, ys):
        uniq, inv = np.unique(c, return_inverse=True)
        tables.append(embed_matrix(scheme.embedder, uniq, scheme.d).data)
        indices.append(inv.ravel())
    return TabulatedInput(tuple(tables), tuple(indices))


def to_pgm(grid: np.ndarray, comments: list[str]) -> bytes:
    return encode_pgm(np.clip(grid, 0.0, 1.0), maxval=255, comments=comments)


def _fit_2d_linear(scheme, img: Signal2D, epochs, lr, split_spec, seed, learner="adam", ridge=1e-8):
    xs, ys = pixel_coords(img.shape)
    x = embed_2d_matrix(scheme, xs, ys)
    y = img.grid.ravel()
    tr, te = split_2d(img.shape, SplitSpec.parse(split_spec))
    if learner == "closed-form":
        model = fit_linear_closed_form(x[tr], y[tr], ridge=ridge)
        train, test = evaluate_psnr(model.predict(x[tr]), y[tr]), evaluate_psnr(model.predict(x[te]), y[te])
    else:
        cfg = TrainConfig(epochs=epochs, learning_rate=lr, seed=seed, log_every=epochs)
        model, trace = fit_linear_adam(x[tr], y[tr], cfg, x[te], y[te])
        train, test = trace.final_train_psnr, trace.final_test_psnr
    return model.predict(x).reshape(img.shape), train, test


def _cell_reconstruct_2d(img, sigma, d, width, epochs, lr, split_spec, seed):
    scheme = Embedding2DScheme("separable", Embedder.gaussian(sigma), d)
    xs, ys = pixel_coords(img.shape)
    x = tabulated_2d(scheme, xs, ys)
    y = img.grid.ravel()
    tr, te = split_2d(img.shape, SplitSpec.parse(split_spec))
    m = Mlp.init([x.width, width, width, width, 1], seed=seed)
    cfg = TrainConfig(epochs=epochs, learning_rate=lr, seed=seed, log_every=max(1, epochs // 10))
    trace = mlp_train(m, x.take(tr), y[tr], x.take(te), y[te], cfg)
    recon = m.forward(x).reshape(img.shape)
    return dict(learner="mlp", scheme="separable", sigma=sigma, d=d, train_psnr=trace.final_train_psnr, test_psnr=trace.final_test_psnr), recon


def _cell_rank2(img, sigma, d, epochs, lr, split_spec, seed):
    scheme = Embedding2DScheme("separable", Embedder.gaussian(sigma), d)
    recon, train, test = _fit_2d_linear(scheme, img, epochs, lr, split_spec, seed)
    s = np.linalg.svd(recon, compute_uv=False)
    row = dict(learner="linear", scheme="separable", sigma=sigma, d=d, train_psnr=train, test_psnr=test)
    return row, recon, (float(s[2] / s[0]) if s[0] > 0 else float("nan"))


def run_reconstruct_2d(spec: ExperimentSpec) -> ExperimentReport:
    p = spec.params
    img = signal_image(p, p["size"])
    small = signal_image(p, p["rank_check_size"])
    jobs = [
        (
            _cell_reconstruct_2d,
            dict(img=img, sigma=s, d=p["d"], width=p["width"], epochs=p["epochs"], lr=p["learning_rate"], split_spec=p["split"], seed=cell_seed(spec.seed, i)),
        )
        for i, s in enumerate(p["sigmas"])
    ]
    rank_job = (
        _cell_rank2,
        dict(
            img=small, sigma=p["rank_check_sigma"], d=p["rank_check_d"], epochs=p["epochs"], lr=p["rank_check_lr"],
            split_spec=p["split"], seed=cell_seed(spec.seed, len(jobs)),
        ),
    )
    results = execute(jobs + [rank_job], spec.jobs)
    rank_row, rank_recon, ratio = results[-1]
    rows = [r[0] for r in results[:-1]] + [rank_row]
    rep = ExperimentReport(
        spec,
        ["learner", "scheme", "sigma", "d", "train_psnr", "test_psnr"],
        rows,
        ["learner", "scheme", "sigma", "d"],
        ["train_psnr", "test_psnr"],
        plot=("sigma", ["train_psnr", "test_psnr"], True),
    )
    header = spec.header_lines()
    rep.artifacts["target.pgm"] = to_pgm(img.grid, header)
    for (row, recon) in results[:-1]:
        rep.artifacts[f"mlp-sigma{row['sigma']:g}.pgm"] = to_pgm(recon, header)
    rep.artifacts["linear-rank-check.pgm"] = to_pgm(rank_recon, header)
    rep.assertions.append(
        Assertion("linear-separable-rank-2", ratio <= 1e-6, f"σ3/σ1 of the {small.shape[0]}×{small.shape[1]} reconstruction = {ratio:.3g}")
    )
    sig_sorted = sorted(p["sigmas"])
    if len(sig_sorted) == 3:
        test = {r["sigma"]: r["test_psnr"] for r in rows if r["learner"] == "mlp"}
        lo, mid, hi = sig_sorted
        rep.assertions.append(
            Assertion(
                "mid-sigma-best-test-2d",
                test[mid] > test[lo] and test[mid] > test[hi],
                f"test PSNR {lo:g}: {test[lo]:.2f}, {mid:g}: {test[mid]:.2f}, {hi:g}: {test[hi]:.2f}",
            )
        )
    return rep


# --- directions-2d -----------------------------------------------------------------

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, probes: int) -> tuple[float, float, list]:
    """Maximize ``f`` on ``[lo, hi]`` with exactly ``probes`` evaluations; returns (best x, best f, history)."""
    if probes < 2:
        raise ValueError("golden-section search needs at least 2 probes")
    a, b = lo, hi
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    hist = [(c, fc), (d, fd)]
    for _ in range(probes - 2):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
            hist.append((c, fc))
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
            hist.append((d, fd))
    best = max(hist, key=lambda t: t[1])
    return best[0], best[1], hist


def _cell_directions(img, mode, d, log_lo, log_hi, probes, learner, epochs, lr, ridge, split_spec, seed):
    def scheme_for(sigma):
        if mode == "grid":
            return Embedding2DScheme("grid", Embedder.gaussian(sigma), max(2, math.isqrt(d)))
        if mode == "separable":
            return Embedding2DScheme("separable", Embedder.gaussian(sigma), d)
        return Embedding2DScheme("directions", Embedder.gaussian(sigma), d)

    def score(log_sigma):
        _, _, test = _fit_2d_linear(scheme_for(10.0**log_sigma), img, epochs, lr, split_spec, seed, learner, ridge)
        return test

    best_log, best_test, hist = golden_section_max(score, log_lo, log_hi, probes)
    scheme = scheme_for(10.0**best_log)
    return dict(
        scheme=mode, d=d, embedding_dim=scheme.output_dim, best_sigma=10.0**best_log, test_psnr=best_test,
        heuristic_sigma=heuristic_sigma_2d(d), probes=len(hist),
    )


def run_directions_2d(spec: ExperimentSpec) -> ExperimentReport:
    p = spec.params
    img = signal_image(p, p["size"])
    jobs = []
    idx = 0
    for d in p["dims"]:
        for mode in p["schemes"]:
            jobs.append(
                (
                    _cell_directions,
                    dict(
                        img=img, mode=mode, d=d, log_lo=math.log10(p["sigma_min"]), log_hi=math.log10(p["sigma_max"]),
                        probes=p["probes"], learner=p["learner"], epochs=p["epochs"], lr=p["learning_rate"],
                        ridge=p["ridge"], split_spec=p["split"], seed=cell_seed(spec.seed, idx),
                    ),
                )
            )
            idx += 1
    rows = execute(jobs, spec.jobs)
    rep = ExperimentReport(
        spec,
        ["scheme", "d", "embedding_dim", "best_sigma", "heuristic_sigma", "test_psnr", "probes"],
        rows,
        ["scheme", "d"],
        ["test_psnr", "best_sigma"],
        plot=("d", ["test_psnr"], True),
    )
    if {"separable", "directions"} <= set(p["schemes"]):
        d0 = min(p["dims"])
        sep = next(r["test_psnr"] for r in rows if r["scheme"] == "separable" and r["d"] == d0)
        dirs = next(r["test_psnr"] for r in rows if r["scheme"] == "directions" and r["d"] == d0)
        rep.assertions.append(
            Assertion("directions-beat-separable-at-low-d", dirs >= sep, f"d={d0}: directions {dirs:.2f} dB vs separable {sep:.2f} dB")
        )
    return rep


# --- registry ---------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentInfo:
    runner: Callable[[ExperimentSpec], ExperimentReport]
    description: str
    desk: dict
    paper: dict


_SOURCE = dict(signal=SYNTHETIC, signal_seed=0, split="even-odd")

EXPERIMENTS: dict[str, ExperimentInfo] = {
    "stable-rank-curves": ExperimentInfo(
        run_stable_rank_curves,
        "stable rank vs σ (Gaussian), vs N (impulse/sine/square), RFF matched pairs",
        dict(
            gaussian_sigmas=parse_value("logspace(-4, -1, 13)"), gaussian_n=1024, d=8192,
            catalog_kinds=["impulse", "sine", "square"], catalog_n=[16, 32, 64, 128, 256, 512, 1024],
            rff_sigma_g=[0.01, 0.02, 0.04], rff_seeds=list(range(10)), sine_freq=1.0, square_period=2.0,
        ),
        dict(gaussian_sigmas=parse_value("logspace(-4, -1, 50)"), catalog_n=[16, 32, 64, 128, 256, 512, 1024, 2048]),
    ),
    "gauss-vs-rff-variance": ExperimentInfo(
        run_gauss_vs_rff_variance,
        "seed variance of test PSNR for Gaussian vs matched RFF embeddings",
        dict(_SOURCE, sigma_g=0.005, dims=[32, 64, 128, 256, 512], seeds=list(range(10)), n=512, rows=1,
             epochs=4000, learning_rate=1e-4, init="glorot"),
        dict(dims=[32, 64, 128, 256, 512, 1024, 2048, 4096]),
    ),
    "embedder-performance": ExperimentInfo(
        run_embedder_performance,
        "train/test PSNR and embedding stable rank of each embedder vs N",
        dict(_SOURCE, kinds=["impulse", "noise", "square", "sine", "gaussian", "rff"], n_values=[32, 64, 128, 256],
             rows=3, d=2048, epochs=4000, learning_rate=1e-4, gaussian_sigma="auto", sine_freq=1.0, square_period=2.0),
        dict(rows=10, d=10000, n_values=[32, 64, 128, 256, 512]),
    ),
    "sigma-sweep": ExperimentInfo(
        run_sigma_sweep,
        "Gaussian train/test PSNR over 50 log-spaced σ per N, with key points",
        dict(_SOURCE, n_values=[64, 128, 256], sigmas=parse_value("logspace(-4, -1, 50)"), rows=1, d=2048,
             epochs=4000, learning_rate=1e-4),
        dict(rows=10, d=10000),
    ),
    "mlp-rank-tracking": ExperimentInfo(
        run_mlp_rank_tracking,
        "MLP hidden-layer stable ranks and PSNR during training for raw and embedded inputs",
        dict(_SOURCE, inputs=["none", "sine", "gaussian", "rff"], rows=1, noise_rows=1, n=256, d=1024, sigma_g=0.01,
             width=128, epochs=2000, lr_raw=1e-3, lr_embedded=1e-4, log_every=10, rank_every=100),
        dict(rows=10, noise_rows=10, d=4096, width=256, rank_every=10),
    ),
    "reconstruct-1d": ExperimentInfo(
        run_reconstruct_1d,
        "linear Gaussian-embedding reconstructions of rows at three σ, with dense curves",
        dict(_SOURCE, sigmas=[0.0003, 0.002, 0.01], rows=3, n=512, d=2048, epochs=2000, learning_rate=1e-3,
             dense_points=2049, outside=0.1),
        dict(d=10000),
    ),
    "reconstruct-2d": ExperimentInfo(
        run_reconstruct_2d,
        "4-layer MLP on separable Gaussian embeddings of an image, plus the linear rank-2 check",
        dict(_SOURCE, sigmas=[0.001, 0.003, 0.07], size=256, d=1024, width=32, epochs=2000, learning_rate=1e-4,
             rank_check_size=64, rank_check_d=256, rank_check_sigma=0.01, rank_check_lr=1e-3),
        dict(size=512, d=2048, width=256),
    ),
    "directions-2d": ExperimentInfo(
        run_directions_2d,
        "best test PSNR per embedding dimension for separable, 4-direction and grid Gaussian embeddings",
        dict(_SOURCE, schemes=["separable", "directions", "grid"], dims=[16, 32, 64, 128], size=64, probes=12,
             sigma_min=1e-4, sigma_max=1e-1, learner="closed-form", ridge=1e-8, epochs=2000, learning_rate=1e-3),
        dict(size=256, dims=[16, 32, 64, 128, 256, 512], learner="adam"),
    ),
}


def run(spec: ExperimentSpec) -> ExperimentReport:
    return EXPERIMENTS[spec.id].runner(spec)
