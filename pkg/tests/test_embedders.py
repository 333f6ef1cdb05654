import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posenc.embedders import (
    Embedder,
    Embedding2DScheme,
    embed,
    embed_2d,
    embed_2d_matrix,
    embed_matrix,
    estimate_bandwidth,
    nearest_index,
    rff_frequencies,
    sample_grid,
    shifted_basis,
)
from posenc.experiments import pixel_coords, tabulated_2d
from posenc.spectral import analysis_grid


def test_gaussian_example():
    v = embed(Embedder.gaussian(0.1), 0.5, 5)
    assert v[2] == pytest.approx(math.exp(-0.5))
    assert v.max() <= 1.0
    assert embed(Embedder.gaussian(0.1), 0.4, 5).max() == 1.0


def test_impulse_example():
    v = embed(Embedder.impulse(), 0.31, 10)
    assert v.tolist() == [0, 0, 0, 1, 0, 0, 0, 0, 0, 0]


def test_impulse_tie_goes_low():
    assert nearest_index(0.25, 10) == 2  # 0.25 lies halfway between 0.2 and 0.3
    assert nearest_index(0.999, 10) == 9


def test_sine_example():
    np.testing.assert_allclose(embed(Embedder.sine(1.0), 0.0, 4), [0, 1, 0, -1], atol=1e-15)


def test_rff_layout_and_errors():
    e = Embedder.rff(3.0, seed=5)
    v = embed(e, 0.2, 8)
    b = rff_frequencies(e, 8)
    assert b.size == 4
    np.testing.assert_allclose(v, np.concatenate([np.cos(2 * np.pi * 0.2 * b), np.sin(2 * np.pi * 0.2 * b)]))
    with pytest.raises(ValueError):
        embed(e, 0.2, 7)


@pytest.mark.parametrize("x", [-0.01, 1.01, float("nan")])
def test_coordinates_outside_rejected(x):
    with pytest.raises(ValueError):
        embed(Embedder.gaussian(0.1), x, 8)


def test_allow_outside():
    v = embed(Embedder.gaussian(0.01), 1.2, 64, allow_outside=True)
    assert v.max() < 1e-100


@pytest.mark.parametrize("kwargs", [dict(kind="gaussian", sigma=0), dict(kind="sine", freq=-1), dict(kind="square", period=0), dict(kind="blob")])
def test_invalid_parameters(kwargs):
    with pytest.raises(ValueError):
        Embedder(**kwargs)


def test_impulse_grid_is_identity():
    m = embed_matrix(Embedder.impulse(), analysis_grid(32), 32).data
    np.testing.assert_array_equal(m, np.eye(32))


@pytest.mark.parametrize("e", [Embedder.gaussian(0.03), Embedder.noise(4), Embedder.rff(5.0, 2), Embedder.square(), Embedder.impulse()])
def test_single_row_matches_embed(e):
    m = embed_matrix(e, [0.37], 64)
    assert m.shape == (1, 64)
    np.testing.assert_array_equal(m.data[0], embed(e, 0.37, 64))


def test_gaussian_grid_is_near_circulant():
    d = 512
    m = embed_matrix(Embedder.gaussian(0.01), analysis_grid(d), d).data
    shifted = np.roll(m[1:], -1, axis=1)
    interior = slice(int(0.1 * d), int(0.9 * d))  # 10 sigma from either edge
    assert np.max(np.abs(m[:-1][interior] - shifted[interior])) < 1e-12


@settings(max_examples=40)
@given(st.floats(0, 1), st.integers(2, 300))
def test_shift_structure(x, d):
    for e in (Embedder.gaussian(0.05), Embedder.sine(2.0), Embedder.square(2.0)):
        np.testing.assert_array_equal(embed(e, x, d), shifted_basis(e, sample_grid(d) - x))


@settings(max_examples=40)
@given(st.floats(0, 1), st.integers(2, 300))
def test_value_ranges(x, d):
    g = embed(Embedder.gaussian(0.02), x, d)
    assert np.all(g <= 1.0) and np.all(g >= 0.0)
    assert set(np.unique(embed(Embedder.square(), x, d))) <= {-1.0, 1.0}
    s = embed(Embedder.sine(3.0), x, d)
    assert np.all(np.abs(s) <= 1.0)


def test_noise_is_rolled_table():
    e = Embedder.noise(7)
    a = embed(e, 0.0, 16)
    b = embed(e, 3 / 16, 16)
    np.testing.assert_array_equal(np.roll(a, 3), b)


@pytest.mark.parametrize("e", [Embedder.noise(11), Embedder.rff(7.0, 11)])
def test_determinism(e):
    a = embed_matrix(e, np.linspace(0, 1, 9), 32).data
    b = embed_matrix(Embedder(e.kind, sigma=e.sigma, seed=e.seed), np.linspace(0, 1, 9), 32).data
    assert a.tobytes() == b.tobytes()
    c = embed_matrix(Embedder(e.kind, sigma=e.sigma, seed=e.seed + 1), np.linspace(0, 1, 9), 32).data
    assert not np.array_equal(a, c)


def test_descriptor_roundtrip():
    e = Embedder.rff(0.25, seed=3)
    back, d = Embedder.from_text(e.to_text(64))
    assert back == e and d == 64
    assert Embedder.from_text("kind=gaussian sigma=0.01") == (Embedder.gaussian(0.01), None)


# --- 2-D ----------------------------------------------------------------------


def test_separable_symmetric_point():
    v = embed_2d(Embedding2DScheme("separable", Embedder.gaussian(0.05), 16), 0.5, 0.5)
    assert v.size == 32
    np.testing.assert_array_equal(v[:16], v[16:])


def test_axis_directions_equal_separable():
    e = Embedder.gaussian(0.05)
    sep = embed_2d(Embedding2DScheme("separable", e, 16), 0.3, 0.8)
    dirs = embed_2d(Embedding2DScheme("directions", e, 16, angles=(0, 90)), 0.3, 0.8)
    np.testing.assert_allclose(dirs, sep, atol=1e-15)


def test_directions_rescaled_into_unit_interval():
    e = Embedder.gaussian(0.05)
    scheme = Embedding2DScheme("directions", e, 16)
    assert scheme.output_dim == 64
    # corner (1, 1) projects to the top of the 45 degree range, (1, 0) to the bottom of 135
    v = embed_2d(scheme, 1.0, 1.0)
    np.testing.assert_allclose(v[16:32], embed(e, 1.0, 16), atol=1e-12)
    w = embed_2d(scheme, 1.0, 0.0)
    np.testing.assert_allclose(w[48:], embed(e, 0.0, 16), atol=1e-12)


def test_grid_example():
    v = embed_2d(Embedding2DScheme("grid", Embedder.gaussian(0.1), 3), 0.0, 0.0)
    t = np.array([0, 1 / 3, 2 / 3])
    expect = np.exp(-(t[:, None] ** 2 + t[None, :] ** 2) / (2 * 0.01)).ravel()
    np.testing.assert_allclose(v, expect)
    assert v[0] == 1.0


def test_grid_requires_gaussian():
    with pytest.raises(ValueError):
        Embedding2DScheme("grid", Embedder.sine(), 4)


@pytest.mark.parametrize("mode", ["separable", "directions"])
def test_tabulated_matches_dense(mode):
    scheme = Embedding2DScheme(mode, Embedder.gaussian(0.04), 12)
    xs, ys = pixel_coords((6, 7))
    tab = tabulated_2d(scheme, xs, ys)
    dense = embed_2d_matrix(scheme, xs, ys)
    np.testing.assert_allclose(tab.dense(), dense, atol=1e-15)
    rng = np.random.default_rng(0)
    w = rng.normal(size=(scheme.output_dim, 5))
    delta = rng.normal(size=(len(xs), 5))
    np.testing.assert_allclose(tab.first_layer(w), dense @ w, atol=1e-12)
    np.testing.assert_allclose(tab.first_layer_grad(delta), dense.T @ delta, atol=1e-12)
    rows = np.array([3, 0, 17])
    np.testing.assert_allclose(tab.take(rows).dense(), dense[rows], atol=1e-15)


# --- bandwidth ----------------------------------------------------------------


@pytest.mark.parametrize("d_probe", [256, 1024, 4096])
def test_sine_bandwidth_is_two(d_probe):
    assert estimate_bandwidth(Embedder.sine(1.0), d_probe, 0.99) == 2


def test_impulse_bandwidth_is_flat():
    assert estimate_bandwidth(Embedder.impulse(), 1024, 0.99) >= 0.99 * 1024


def test_gaussian_bandwidth_shrinks_with_sigma():
    widths = [estimate_bandwidth(Embedder.gaussian(s), 1024, 0.99) for s in (0.01, 0.02, 0.05, 0.1)]
    assert widths == sorted(widths, reverse=True) and len(set(widths)) == 4
    assert widths[2] < 20


def test_bandwidth_validation():
    with pytest.raises(ValueError):
        estimate_bandwidth(Embedder.sine(), 300)
    with pytest.raises(ValueError):
        estimate_bandwidth(Embedder.sine(), 256, 1.0)
