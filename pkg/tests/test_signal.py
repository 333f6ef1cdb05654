import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posenc.signal import (
    PSNR_CAP_DB,
    NormalizationError,
    Signal1D,
    Signal2D,
    SignalFormatError,
    SplitSpec,
    encode_pgm,
    format_csv,
    load_signal_1d,
    load_signal_2d,
    parse_csv,
    parse_pgm,
    psnr,
    split,
    split_2d,
)


def test_csv_three_values(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("0,128,255\n")
    s = load_signal_1d(p)
    np.testing.assert_allclose(s.samples, [0, 128 / 255, 1])
    np.testing.assert_allclose(s.coords, [0, 0.5, 1])
    assert abs(s.samples[1] - 0.50196) < 1e-5


def test_csv_constant_rejected(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("7,7,7\n")
    with pytest.raises(NormalizationError):
        load_signal_1d(p)


def test_pgm_gradient_row(tmp_path):
    # 4x4 gradient, pixel (r, c) = 16 * (4r + c); row 1 holds 64, 80, 96, 112
    pixels = bytes(16 * i for i in range(16))
    data = b"P5\n# gradient\n4 4\n255\n" + pixels
    p = tmp_path / "g.pgm"
    p.write_bytes(data)
    s = load_signal_1d(p, row_index=1)
    np.testing.assert_allclose(s.samples, [0, 1 / 3, 2 / 3, 1])
    grid, maxval = parse_pgm(data)
    assert maxval == 255 and grid.shape == (4, 4) and grid[1, 0] == 64


def test_pgm_ascii_and_comments():
    grid, maxval = parse_pgm(b"P2 # c1\n3 2 # c2\n9\n0 1 2\n3 4 9\n")
    assert maxval == 9
    np.testing.assert_array_equal(grid, [[0, 1, 2], [3, 4, 9]])


def test_pgm_16bit_roundtrip():
    g = np.linspace(0, 1, 12).reshape(3, 4)
    back, maxval = parse_pgm(encode_pgm(g, maxval=65535, comments=["x"]))
    assert maxval == 65535
    np.testing.assert_allclose(back / 65535, g, atol=1 / 65535)


@pytest.mark.parametrize(
    "data, where",
    [(b"P6\n2 2\n255\n", "magic"), (b"P5\n2 2\n255\n\x00", "raster"), (b"P2\n2 2\n255\n1 2 x 4", "byte"), (b"P5\n2", "truncated")],
)
def test_pgm_errors_name_location(data, where):
    with pytest.raises(SignalFormatError, match=where):
        parse_pgm(data)


def test_csv_error_names_line():
    with pytest.raises(SignalFormatError, match="line 2"):
        parse_csv("1\nabc\n")
    with pytest.raises(SignalFormatError, match="ragged"):
        parse_csv("1,2\n3\n")


def test_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    values = rng.uniform(0, 1, 50)
    values[[0, 1]] = 0.0, 1.0
    p = tmp_path / "r.csv"
    p.write_text(format_csv(values, comments=["round trip"]))
    np.testing.assert_allclose(load_signal_1d(p).samples, values, atol=1e-9)


def test_csv_matrix_is_image(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("0,1,2\n3,4,5\n")
    img = load_signal_2d(p)
    assert img.shape == (2, 3)
    with pytest.raises(SignalFormatError):
        load_signal_1d(p)
    assert len(load_signal_1d(p, row_index=1)) == 3


def test_unsupported_suffix(tmp_path):
    p = tmp_path / "x.png"
    p.write_bytes(b"\x89PNG")
    with pytest.raises(SignalFormatError, match=r"\.csv, \.pgm"):
        load_signal_1d(p)


def test_signal_invariants():
    with pytest.raises(ValueError):
        Signal1D(np.array([0.0, 1.0, 0.5]), np.array([0.0, 0.7, 0.5]))
    with pytest.raises(ValueError):
        Signal1D(np.array([0.0, 2.0]), np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        Signal2D(np.zeros((1, 4)))
    s = Signal1D.from_values([3.0, 1.0, 2.0])
    assert not s.samples.flags.writeable


@pytest.mark.parametrize(
    "n, text, train, test",
    [
        (5, "even-odd", [0, 2, 4], [1, 3]),
        (6, "stride(3)", [0, 3], [1, 2, 4, 5]),
        (4, "all-train", [0, 1, 2, 3], []),
    ],
)
def test_split_examples(n, text, train, test):
    tr, te = split(n, SplitSpec.parse(text))
    assert tr.tolist() == train and te.tolist() == test


def test_split_errors():
    with pytest.raises(ValueError):
        split(3, SplitSpec.parse("stride(3)"))
    with pytest.raises(ValueError):
        SplitSpec.parse("stride(1)")
    with pytest.raises(ValueError):
        SplitSpec.parse("random")


@given(st.integers(2, 200), st.integers(2, 9))
def test_split_partitions(n, k):
    for spec in (SplitSpec("even-odd"), SplitSpec("stride", k)):
        if spec.scheme == "stride" and k >= n:
            continue
        tr, te = split(n, spec)
        assert len(tr) > 0
        assert sorted(np.concatenate([tr, te]).tolist()) == list(range(n))
        assert not set(tr) & set(te)


def test_split_2d_product():
    tr, te = split_2d((4, 5))
    assert len(tr) == 2 * 3 and len(tr) + len(te) == 20
    rows, cols = np.divmod(tr, 5)
    assert set(rows) == {0, 2} and set(cols) == {0, 2, 4}


def test_psnr_examples():
    t = np.array([0.2, 0.4, 0.9])
    assert psnr(t, t) == PSNR_CAP_DB
    assert psnr(t + 0.1, t) == pytest.approx(20.0)
    assert psnr([1.0, 1.0], [0.0, 0.0]) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        psnr([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        psnr([np.nan], [1.0])


@settings(max_examples=50)
@given(st.lists(st.floats(0, 1), min_size=2, max_size=40), st.integers(0, 2**32 - 1))
def test_psnr_permutation_invariant(values, seed):
    t = np.array(values)
    p = np.clip(t + np.random.default_rng(seed).normal(0, 0.1, t.size), 0, 1)
    perm = np.random.default_rng(seed + 1).permutation(t.size)
    assert psnr(p[perm], t[perm]) == pytest.approx(psnr(p, t), abs=1e-9)


@settings(max_examples=50)
@given(st.integers(1, 40), st.floats(1e-5, 0.5), st.floats(1.01, 3.0))
def test_psnr_decreases_with_error(n, err, factor):
    t = np.full(n, 0.5)
    assert psnr(t + err * factor, t) < psnr(t + err, t)
