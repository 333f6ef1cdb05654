import math

import numpy as np
import pytest

from posenc.experiments import (
    EXPERIMENTS,
    Assertion,
    ExperimentReport,
    SpecError,
    aggregate,
    cell_seed,
    format_value,
    golden_section_max,
    keypoints,
    load_spec,
    make_spec,
    parse_override,
    parse_spec_text,
    parse_value,
    peak_sigma,
    run,
)
from posenc.signal import format_csv

TINY = {
    "stable-rank-curves": dict(
        gaussian_sigmas=[0.05, 0.1], gaussian_n=64, d=256, catalog_n=[16, 32], rff_sigma_g=[0.05], rff_seeds=[0, 1]
    ),
    "gauss-vs-rff-variance": dict(dims=[16, 32], seeds=[0, 1, 2], n=64, epochs=50),
    "embedder-performance": dict(n_values=[16, 32], rows=2, d=64, epochs=50),
    "sigma-sweep": dict(n_values=[16], sigmas=parse_value("logspace(-3, -1, 5)"), d=64, epochs=50),
    "mlp-rank-tracking": dict(inputs=["none", "gaussian"], n=32, d=64, width=8, epochs=20, log_every=10, rank_every=10),
    "reconstruct-1d": dict(sigmas=[0.002, 0.01], rows=2, n=64, d=128, epochs=50, dense_points=65),
    "reconstruct-2d": dict(
        sigmas=[0.01, 0.05], size=16, d=32, width=4, epochs=10, rank_check_size=16, rank_check_d=16, rank_check_lr=1e-3
    ),
    "directions-2d": dict(dims=[8], size=16, probes=4),
}

EXPECTED_ROWS = {
    "stable-rank-curves": 2 + 3 * 2 + (1 + 2),
    "gauss-vs-rff-variance": 2 * 2 * 3,
    "embedder-performance": 6 * 2 * 2,
    "sigma-sweep": 5,
    "mlp-rank-tracking": 2 * 2,
    "reconstruct-1d": 2 * 2,
    "reconstruct-2d": 2 + 1,
    "directions-2d": 3,
}


@pytest.fixture(scope="module")
def tiny_reports():
    return {k: run(make_spec(k, v)) for k, v in TINY.items()}


# --- parsing ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "text, value",
    [
        ("3", 3),
        ("2.5e-3", 0.0025),
        ("true", True),
        ("none", None),
        ("gaussian", "gaussian"),
        ("[1, 2.0, x]", [1, 2.0, "x"]),
        ("[]", []),
        ("range(2, 5)", [2, 3, 4]),
        ("linspace(0, 1, 3)", [0.0, 0.5, 1.0]),
    ],
)
def test_parse_value(text, value):
    assert parse_value(text) == value


def test_logspace():
    v = parse_value("logspace(-4, -1, 50)")
    assert len(v) == 50 and v[0] == pytest.approx(1e-4) and v[-1] == pytest.approx(0.1)
    assert np.allclose(np.diff(np.log10(v)), 3 / 49)
    with pytest.raises(SpecError):
        parse_value("logspace(1, 2)")
    with pytest.raises(SpecError):
        parse_value("[1, 2")


def test_format_roundtrip():
    for v in ([0.1, 3, "a"], 1e-300, True, None, "x"):
        assert parse_value(format_value(v)) == v


def test_parse_spec_text():
    exp, params = parse_spec_text("# header\nexperiment = sigma-sweep\nd = 64  # dims\n\nn_values = [16, 32]\n")
    assert exp == "sigma-sweep" and params == {"d": 64, "n_values": [16, 32]}
    with pytest.raises(SpecError, match="line 1"):
        parse_spec_text("d 64")
    with pytest.raises(SpecError, match="experiment"):
        parse_spec_text("d = 64")


def test_overrides_and_unknown_keys(tmp_path):
    assert parse_override("d=128") == ("d", 128)
    with pytest.raises(SpecError):
        parse_override("d")
    with pytest.raises(SpecError, match="no parameter"):
        make_spec("sigma-sweep", {"bogus": 1})
    with pytest.raises(SpecError, match="unknown experiment"):
        make_spec("fig-11")
    p = tmp_path / "s.spec"
    p.write_text("experiment = reconstruct-1d\nrows = 2\n")
    spec = load_spec(p, {"d": 99}, paper_scale=True)
    assert spec["rows"] == 2 and spec["d"] == 99 and spec.paper_scale


def test_paper_scale_defaults():
    desk = make_spec("embedder-performance")
    paper = make_spec("embedder-performance", paper_scale=True)
    assert desk["d"] == 2048 and paper["d"] == 10000 and paper["rows"] == 10
    assert "scale = paper" in paper.header_lines()


def test_spec_files_parse():
    from pathlib import Path

    specs = sorted(Path(__file__).resolve().parents[1].glob("figs/*.spec"))
    assert {s.stem for s in specs} == set(EXPERIMENTS)
    for s in specs:
        assert load_spec(s).id == s.stem


# --- reports ------------------------------------------------------------------


@pytest.mark.parametrize("exp_id", list(TINY))
def test_row_counts(tiny_reports, exp_id):
    rep = tiny_reports[exp_id]
    assert len(rep.rows) == EXPECTED_ROWS[exp_id]
    for r in rep.rows:
        for m in rep.metrics:
            if r[m] != "":
                assert math.isfinite(float(r[m]))


@pytest.mark.parametrize("exp_id", list(TINY))
def test_aggregates_recompute(tiny_reports, exp_id):
    rep = tiny_reports[exp_id]
    for agg in rep.aggregates:
        members = [r for r in rep.rows if all(r[k] == agg[k] for k in rep.group_by)]
        assert agg["count"] == len(members)
        for m in rep.metrics:
            vals = np.array([float(r[m]) for r in members if r[m] != ""])
            if vals.size:
                assert abs(agg[f"{m}_mean"] - vals.mean()) <= 1e-12 * max(1.0, abs(vals.mean()))
                assert abs(agg[f"{m}_std"] - vals.std()) <= 1e-12 * max(1.0, vals.std())


def test_aggregate_helper():
    rows = [dict(a=1, v=1.0), dict(a=1, v=3.0), dict(a=2, v=5.0)]
    out = aggregate(rows, ["a"], ["v"])
    assert out == [dict(a=1, count=2, v_mean=2.0, v_std=1.0), dict(a=2, count=1, v_mean=5.0, v_std=0.0)]


def test_report_artifacts(tiny_reports, tmp_path):
    rep = tiny_reports["reconstruct-2d"]
    paths = rep.write(tmp_path, emit_gnuplot=True)
    names = {p.name for p in paths}
    assert {"reconstruct-2d.csv", "reconstruct-2d.summary.csv", "reconstruct-2d.assertions.csv", "reconstruct-2d.gp"} <= names
    pgms = [p for p in paths if p.suffix == ".pgm"]
    assert pgms and all(p.read_bytes().startswith(b"P5") for p in pgms)
    for p in paths:
        if p.suffix in (".csv",):
            assert p.read_text().startswith("# posenc")
    assert "plot '" in (tmp_path / "reconstruct-2d.gp").read_text()


def test_sigma_sweep_keypoint_artifact(tiny_reports):
    text = tiny_reports["sigma-sweep"].artifacts["keypoints.csv"]
    body = [line for line in text.splitlines() if not line.startswith("#")]
    assert body[0] == "N,keypoint,sigma,train_psnr,test_psnr"
    assert len(body) == 1 + 4


def test_reconstruct_1d_curves(tiny_reports):
    rep = tiny_reports["reconstruct-1d"]
    curve = [line for line in rep.artifacts["curves.csv"].splitlines() if not line.startswith("#")]
    assert len(curve) == 1 + 2 * 2 * 65
    outside = next(a for a in rep.assertions if a.name == "outside-range-returns-bias")
    assert outside.passed


def test_rank_two_check(tiny_reports):
    a = next(a for a in tiny_reports["reconstruct-2d"].assertions if a.name == "linear-separable-rank-2")
    assert a.passed


def test_assertion_bool_coercion():
    assert Assertion("x", np.True_, "").passed is True
    rep = ExperimentReport(make_spec("sigma-sweep"), ["a"], [dict(a=1.0)], [], ["a"], [Assertion("bad", False, "d")])
    assert [a.name for a in rep.failed] == ["bad"]


# --- determinism ----------------------------------------------------------------


def test_reproducible_and_schedule_independent():
    spec = make_spec("embedder-performance", TINY["embedder-performance"])
    serial = run(spec).to_csv()
    again = run(spec).to_csv()
    pooled = run(make_spec("embedder-performance", TINY["embedder-performance"], jobs=2)).to_csv()
    assert serial == again == pooled


def test_seed_changes_stochastic_cells():
    a = run(make_spec("mlp-rank-tracking", TINY["mlp-rank-tracking"], seed=0)).to_csv()
    b = run(make_spec("mlp-rank-tracking", TINY["mlp-rank-tracking"], seed=1)).to_csv()
    assert a != b


def test_cell_seed():
    assert cell_seed(0, 3) == cell_seed(0, 3)
    assert len({cell_seed(s, i) for s in range(4) for i in range(50)}) == 200


def test_signal_file_source(tmp_path):
    p = tmp_path / "row.csv"
    p.write_text(format_csv(np.sin(np.linspace(0, 9, 64)) + 2))
    rep = run(make_spec("reconstruct-1d", dict(TINY["reconstruct-1d"], signal=str(p), rows=1)))
    assert len(rep.rows) == 2
    with pytest.raises(SpecError):
        run(make_spec("reconstruct-1d", dict(TINY["reconstruct-1d"], rows=11)))


# --- search helpers ---------------------------------------------------------------


def test_golden_section_finds_peak():
    x, fx, hist = golden_section_max(lambda t: -((t - 0.3) ** 2), -2.0, 2.0, 12)
    assert len(hist) == 12
    assert abs(x - 0.3) < 4 * 0.618**10
    assert fx == max(h[1] for h in hist)
    with pytest.raises(ValueError):
        golden_section_max(lambda t: t, 0, 1, 1)


def test_peak_sigma_ties():
    assert peak_sigma([1e-3, 1e-2, 1e-1], [1.0, 3.0, 2.0]) == 1e-2
    assert peak_sigma([1e-4, 1e-3, 1e-2, 1e-1], [120.0, 120.0, 120.0, 50.0]) == pytest.approx(1e-3)


def test_keypoints_halve_with_n():
    a, b = keypoints(128), keypoints(256)
    for k in a:
        assert b[k] == pytest.approx(a[k] / 2)
    assert a["half_spacing"] == 1 / 256
    assert a["ten_heuristic"] == pytest.approx(10 * a["heuristic"])
