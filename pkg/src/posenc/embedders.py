"""Shifted-basis embedders and the sampled embedding map.

A coordinate ``x`` in [0, 1] is embedded as ``d`` equidistant samples of a
shifted basis function, ``Psi(x)[j] = psi(j/d - x)``. Random Fourier features
are included for comparison; they ignore the sample grid and use seeded
Gaussian frequencies instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

KINDS = ("impulse", "sine", "square", "gaussian", "noise", "rff")


@dataclass(frozen=True)
class Embedder:
    kind: str
    sigma: float | None = None
    freq: float | None = None
    period: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown embedder kind {self.kind!r}; choose from {', '.join(KINDS)}")
        required = {"gaussian": "sigma", "rff": "sigma", "sine": "freq", "square": "period"}
        name = required.get(self.kind)
        if name is not None:
            value = getattr(self, name)
            if value is None or not math.isfinite(value) or value <= 0:
                raise ValueError(f"{self.kind} embedder needs {name} > 0, got {value}")
        if self.kind in ("noise", "rff") and self.seed is None:
            object.__setattr__(self, "seed", 0)

    @classmethod
    def impulse(cls) -> "Embedder":
        return cls("impulse")

    @classmethod
    def sine(cls, freq: float = 1.0) -> "Embedder":
        return cls("sine", freq=freq)

    @classmethod
    def square(cls, period: float = 2.0) -> "Embedder":
        return cls("square", period=period)

    @classmethod
    def gaussian(cls, sigma: float) -> "Embedder":
        return cls("gaussian", sigma=sigma)

    @classmethod
    def noise(cls, seed: int = 0) -> "Embedder":
        return cls("noise", seed=seed)

    @classmethod
    def rff(cls, sigma: float, seed: int = 0) -> "Embedder":
        return cls("rff", sigma=sigma, seed=seed)

    @property
    def label(self) -> str:
        if self.kind in ("gaussian", "rff"):
            return f"{self.kind}(sigma={self.sigma:g})"
        if self.kind == "sine":
            return f"sine(freq={self.freq:g})"
        if self.kind == "square":
            return f"square(period={self.period:g})"
        return self.kind

    def to_text(self, d: int | None = None) -> str:
        """Flat ``key=value`` descriptor, e.g. ``kind=gaussian sigma=0.01 d=512``."""
        parts = [f"kind={self.kind}"]
        for key in ("sigma", "freq", "period", "seed"):
            value = getattr(self, key)
            if value is not None:
                parts.append(f"{key}={value!r}")
        if d is not None:
            parts.append(f"d={d}")
        return " ".join(parts)

    @classmethod
    def from_text(cls, text: str) -> tuple["Embedder", int | None]:
        fields = dict(tok.split("=", 1) for tok in text.split())
        kind = fields.pop("kind")
        d = fields.pop("d", None)
        kwargs = {}
        for key, value in fields.items():
            if key == "seed":
                kwargs[key] = int(value)
            elif key in ("sigma", "freq", "period"):
                kwargs[key] = float(value)
            else:
                raise ValueError(f"unknown descriptor key {key!r}")
        return cls(kind, **kwargs), None if d is None else int(d)


@lru_cache(maxsize=64)
def _rff_frequencies(seed: int, sigma: float, d: int) -> np.ndarray:
    b = np.random.default_rng(seed).normal(0.0, sigma, d // 2)
    b.setflags(write=False)
    return b


@lru_cache(maxsize=64)
def _noise_table(seed: int, d: int) -> np.ndarray:
    g = np.random.default_rng(seed).standard_normal(d)
    g.setflags(write=False)
    return g


def rff_frequencies(e: Embedder, d: int) -> np.ndarray:
    """The ``d/2`` frequencies (cycles per unit) a seeded RFF embedder uses at dimension ``d``."""
    if e.kind != "rff":
        raise ValueError("only rff embedders have a frequency table")
    _check_dim(e, d)
    return _rff_frequencies(e.seed, e.sigma, d)


def sample_grid(d: int) -> np.ndarray:
    """The embedder sample positions ``t_j = j/d`` (sampling interval ``1/d``)."""
    return np.arange(d) / d


def nearest_index(x, d: int) -> np.ndarray:
    """Index of the nearest sample position; ties go to the lower index."""
    idx = np.ceil(np.asarray(x, dtype=np.float64) * d - 0.5).astype(np.int64)
    return np.clip(idx, 0, d - 1)


def _check_dim(e: Embedder, d: int):
    if d < 2:
        raise ValueError(f"embedding dimension must be >= 2, got {d}")
    if e.kind == "rff" and d % 2:
        raise ValueError(f"rff needs an even dimension (cos and sin blocks), got {d}")


def _check_coords(x: np.ndarray, allow_outside: bool):
    if not np.all(np.isfinite(x)):
        raise ValueError("coordinates must be finite")
    if not allow_outside and (x.min(initial=0.0) < 0.0 or x.max(initial=0.0) > 1.0):
        raise ValueError("coordinates must lie in [0, 1] (pass allow_outside=True to extrapolate)")


def shifted_basis(e: Embedder, u) -> np.ndarray:
    """The continuous basis ``psi(u)`` at offsets ``u = t - x`` (continuous kinds only)."""
    u = np.asarray(u, dtype=np.float64)
    if e.kind == "gaussian":
        return np.exp(-(u * u) / (2.0 * e.sigma**2))
    if e.kind == "sine":
        return np.sin(2.0 * np.pi * e.freq * u)
    if e.kind == "square":
        return np.where(np.mod(u, e.period) < 0.5 * e.period, 1.0, -1.0)
    raise ValueError(f"{e.kind} embedder has no continuous basis function")


def _embed_rows(e: Embedder, x: np.ndarray, d: int) -> np.ndarray:
    if e.kind == "rff":
        b = _rff_frequencies(e.seed, e.sigma, d)
        phase = 2.0 * np.pi * x[:, None] * b[None, :]
        return np.concatenate([np.cos(phase), np.sin(phase)], axis=1)
    if e.kind == "impulse":
        out = np.zeros((x.size, d))
        out[np.arange(x.size), nearest_index(x, d)] = 1.0
        return out
    if e.kind == "noise":
        # white noise shifted by the coordinate: row i is the table rolled by idx(x_i)
        g = _noise_table(e.seed, d)
        cols = (np.arange(d)[None, :] - nearest_index(x, d)[:, None]) % d
        return g[cols]
    return shifted_basis(e, sample_grid(d)[None, :] - x[:, None])


def embed(e: Embedder, x: float, d: int, allow_outside: bool = False) -> np.ndarray:
    _check_dim(e, d)
    xs = np.asarray([x], dtype=np.float64)
    _check_coords(xs, allow_outside)
    return _embed_rows(e, xs, d)[0]


@dataclass(frozen=True)
class EmbeddingMatrix:
    data: np.ndarray
    coords: np.ndarray
    embedder: Embedder
    d: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    @property
    def meta(self) -> str:
        return self.embedder.to_text(self.d)


def embed_matrix(e: Embedder, coords, d: int, allow_outside: bool = False) -> EmbeddingMatrix:
    """Row ``i`` is ``embed(e, coords[i], d)``."""
    _check_dim(e, d)
    xs = np.atleast_1d(np.asarray(coords, dtype=np.float64))
    if xs.ndim != 1 or xs.size == 0:
        raise ValueError("coords must be a non-empty vector")
    _check_coords(xs, allow_outside)
    data = _embed_rows(e, xs, d)
    data.setflags(write=False)
    xs.setflags(write=False)
    return EmbeddingMatrix(data, xs, e, d)


# --- 2-D composition --------------------------------------------------------


def _rescale_projection(angle_deg: float):
    """Direction vector and affine map taking u.(x, y) over the unit square onto [0, 1]."""
    a = math.radians(angle_deg)
    c, s = math.cos(a), math.sin(a)
    c = 0.0 if abs(c) < 1e-12 else c
    s = 0.0 if abs(s) < 1e-12 else s
    corners = [0.0, c, s, c + s]
    lo, hi = min(corners), max(corners)
    return c, s, lo, hi - lo


@dataclass(frozen=True)
class Embedding2DScheme:
    """How a 2-D point is embedded: ``separable``, ``directions`` or ``grid``.

    ``d`` is the per-axis (or per-direction) dimension; ``grid`` uses ``d``
    centres per axis, ``d*d`` in total.
    """

    mode: str
    embedder: Embedder
    d: int
    angles: tuple[float, ...] = field(default=(0.0, 45.0, 90.0, 135.0))

    def __post_init__(self):
        if self.mode not in ("separable", "directions", "grid"):
            raise ValueError(f"unknown 2-D scheme {self.mode!r}")
        if self.mode == "grid" and self.embedder.kind != "gaussian":
            raise ValueError("grid 2-D embedding is only supported for the gaussian embedder")
        if self.mode == "directions" and not self.angles:
            raise ValueError("directions scheme needs at least one angle")
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))

    @property
    def output_dim(self) -> int:
        if self.mode == "separable":
            return 2 * self.d
        if self.mode == "directions":
            return len(self.angles) * self.d
        return self.d * self.d


def _as_xy(xs, ys):
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    ys = np.atleast_1d(np.asarray(ys, dtype=np.float64))
    if xs.shape != ys.shape:
        raise ValueError("x and y coordinate vectors must have equal length")
    return xs, ys


def block_coordinates(scheme: Embedding2DScheme, xs, ys) -> list[np.ndarray]:
    """1-D coordinates fed to each embedding block (separable and directions modes)."""
    xs, ys = _as_xy(xs, ys)
    if scheme.mode == "separable":
        return [xs, ys]
    if scheme.mode == "directions":
        out = []
        for angle in scheme.angles:
            c, s, lo, span = _rescale_projection(angle)
            out.append((c * xs + s * ys - lo) / span)
        return out
    raise ValueError("grid embeddings are not block-structured")


def embed_2d_matrix(scheme: Embedding2DScheme, xs, ys, allow_outside: bool = False) -> np.ndarray:
    xs, ys = _as_xy(xs, ys)
    e, d = scheme.embedder, scheme.d
    if scheme.mode != "grid":
        blocks = [embed_matrix(e, c, d, allow_outside).data for c in block_coordinates(scheme, xs, ys)]
        return np.concatenate(blocks, axis=1)
    _check_dim(e, d)
    _check_coords(np.concatenate([xs, ys]), allow_outside)
    t = sample_grid(d)
    gx = np.exp(-((t[None, :] - xs[:, None]) ** 2) / (2 * e.sigma**2))
    gy = np.exp(-((t[None, :] - ys[:, None]) ** 2) / (2 * e.sigma**2))
    # centre (t_i, t_j) flattened row-major: index i*d + j
    return (gx[:, :, None] * gy[:, None, :]).reshape(xs.size, d * d)


def embed_2d(scheme: Embedding2DScheme, x: float, y: float) -> np.ndarray:
    return embed_2d_matrix(scheme, [x], [y])[0]


# --- bandwidth --------------------------------------------------------------


def estimate_bandwidth(e: Embedder, d_probe: int = 1024, energy_fraction: float = 0.99) -> int:
    """Fewest DFT bins of ``psi(., x=0.5)`` holding ``energy_fraction`` of its energy.

    Bins are taken in order of decreasing energy, so conjugate pairs enter
    together for real-valued probes. For rff the probe is the embedded kernel
    ``sum_j cos(2 pi b_j (t - 0.5))``, whose spectrum sits at the sampled
    frequencies.
    """
    if d_probe < 256 or d_probe & (d_probe - 1):
        raise ValueError(f"d_probe must be a power of two >= 256, got {d_probe}")
    if not 0.0 < energy_fraction < 1.0:
        raise ValueError("energy_fraction must lie in (0, 1)")
    t = sample_grid(d_probe)
    if e.kind == "rff":
        b = _rff_frequencies(e.seed, e.sigma, d_probe)
        probe = np.cos(2 * np.pi * b[None, :] * (t[:, None] - 0.5)).sum(axis=1)
    else:
        probe = embed(e, 0.5, d_probe)
    energy = np.abs(np.fft.fft(probe)) ** 2
    ranked = np.sort(energy)[::-1]
    cumulative = np.cumsum(ranked) / ranked.sum()
    return int(np.searchsorted(cumulative, energy_fraction - 1e-12) + 1)
