"""Deterministic pepper-like test scenes.

The scene is a continuous function on the unit square: a shaded background
overlaid with soft-edged ellipses ("peppers") carrying highlights, plus a few
small blobs of texture. Sampling it at any resolution gives images and rows
with piecewise-smooth structure and sharp edges, similar to natural photos. Samples are pixel-footprint
averages, so coarse renderings do not alias the fine texture.
"""

from __future__ import annotations

import numpy as np

from .signal import Signal1D, Signal2D, grid_coords, normalize

EDGE_WIDTH = 0.001
SUPERSAMPLE = 4


def _scene(seed: int):
    rng = np.random.default_rng(seed)
    n_obj = 40
    objects = dict(
        cx=rng.uniform(0.0, 1.0, n_obj),
        cy=rng.uniform(0.0, 1.0, n_obj),
        ra=rng.uniform(0.03, 0.14, n_obj),
        rb=rng.uniform(0.02, 0.10, n_obj),
        theta=rng.uniform(0.0, np.pi, n_obj),
        level=rng.uniform(0.0, 1.0, n_obj),
        shade=rng.uniform(0.15, 0.45, n_obj),
    )
    n_tex = 1200
    texture = dict(
        cx=rng.uniform(0.0, 1.0, n_tex),
        cy=rng.uniform(0.0, 1.0, n_tex),
        w=np.exp(rng.uniform(np.log(0.002), np.log(0.006), n_tex)),
        amp=rng.normal(0.0, 0.1, n_tex),
    )
    background = rng.uniform(0.0, 2 * np.pi, 3)
    return objects, texture, background


def pepper_like(x, y, seed: int = 0) -> np.ndarray:
    """Raw (unnormalized) scene intensity at broadcastable coordinates."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    obj, tex, bg = _scene(seed)
    img = 0.35 + 0.08 * np.sin(2 * np.pi * (0.7 * x + 0.4 * y) + bg[0]) + 0.05 * np.cos(
        2 * np.pi * (1.3 * y - 0.5 * x) + bg[1]
    )
    img = np.broadcast_to(img, np.broadcast(x, y).shape).copy()
    for i in range(obj["cx"].size):
        c, s = np.cos(obj["theta"][i]), np.sin(obj["theta"][i])
        dx, dy = x - obj["cx"][i], y - obj["cy"][i]
        u = (c * dx + s * dy) / obj["ra"][i]
        v = (-s * dx + c * dy) / obj["rb"][i]
        r = np.sqrt(u * u + v * v)
        # signed distance to the rim, approximately in coordinate units
        dist = (1.0 - r) * min(obj["ra"][i], obj["rb"][i])
        mask = 0.5 * (1.0 + np.tanh(dist / EDGE_WIDTH))
        highlight = np.exp(-((u + 0.35) ** 2 + (v + 0.3) ** 2) / 0.18)
        inside = obj["level"][i] * (1.0 - obj["shade"][i] * r * r) + 0.25 * highlight
        img = img * (1.0 - mask) + inside * mask
    for i in range(tex["cx"].size):
        d2 = (x - tex["cx"][i]) ** 2 + (y - tex["cy"][i]) ** 2
        img = img + tex["amp"][i] * np.exp(-d2 / (2 * tex["w"][i] ** 2))
    return img


def _pixel_average(xs, ys, n: int, seed: int) -> np.ndarray:
    """Scene averaged over each sample's ``1/n`` square footprint (like a camera pixel)."""
    offsets = ((np.arange(SUPERSAMPLE) + 0.5) / SUPERSAMPLE - 0.5) / n
    total = 0.0
    for ox in offsets:
        for oy in offsets:
            total = total + pepper_like(xs + ox, ys + oy, seed)
    return total / SUPERSAMPLE**2


def row_positions(count: int, seed: int = 0) -> np.ndarray:
    """``count`` distinct vertical positions (the 'random rows' of the scene)."""
    rng = np.random.default_rng([seed, 1])
    return np.sort(rng.uniform(0.08, 0.92, count))


def synthetic_row(n: int, row: int = 0, seed: int = 0, rows: int = 10) -> Signal1D:
    """Row ``row`` (of ``rows`` random rows) sampled at ``n`` points and normalized."""
    y = row_positions(rows, seed)[row]
    values = _pixel_average(grid_coords(n), y, n, seed)
    return Signal1D(normalize(values), grid_coords(n), name=f"pepper-like[s{seed},r{row},n{n}]")


def synthetic_image(h: int, w: int | None = None, seed: int = 0) -> Signal2D:
    w = h if w is None else w
    yy, xx = np.meshgrid(grid_coords(h), grid_coords(w), indexing="ij")
    return Signal2D(normalize(_pixel_average(xx, yy, max(h, w), seed)), name=f"pepper-like[s{seed},{h}x{w}]")


def noise_signal(n: int, seed: int = 0) -> Signal1D:
    """Normalized i.i.d. Gaussian noise: a target with no redundancy."""
    values = np.random.default_rng([seed, 2]).normal(size=n)
    return Signal1D(normalize(values), grid_coords(n), name=f"noise[s{seed},n{n}]")
