"""Stable rank, its closed-form laws, and embedded-distance profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import svds

from .embedders import Embedder, embed_matrix, rff_frequencies

SVD_MAX_MIN_DIM = 2048
LN10 = math.log(10.0)


def top_singular_value(m: np.ndarray, tol: float = 1e-8, seed: int = 0) -> float:
    """Largest singular value: dense SVD for small matrices, seeded Lanczos above."""
    if min(m.shape) <= SVD_MAX_MIN_DIM:
        return float(np.linalg.svd(m, compute_uv=False)[0])
    v0 = np.random.default_rng(seed).standard_normal(min(m.shape))
    s = svds(m, k=1, tol=tol, v0=v0, return_singular_vectors=False)
    return float(s[0])


def stable_rank(m) -> float:
    """``||M||_F^2 / ||M||_2^2``."""
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.size == 0:
        raise ValueError("stable rank needs a non-empty matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    fro2 = float(np.sum(a * a))
    if fro2 == 0.0:
        raise ValueError("stable rank of an all-zero matrix is undefined")
    top = top_singular_value(a)
    return fro2 / (top * top)


def theoretical_stable_rank(e: Embedder, n: int) -> float | None:
    if e.kind == "gaussian":
        return min(n, 1.0 / (2.0 * math.sqrt(math.pi) * e.sigma))
    if e.kind == "rff":
        return min(n, math.sqrt(2.0 * math.pi) * e.sigma)
    if e.kind == "sine":
        return float(min(n, 2))
    if e.kind == "impulse":
        return float(n)
    return None


def analysis_grid(n: int) -> np.ndarray:
    """``n`` coordinates ``i/n``; with ``n == d`` they coincide with the sample grid."""
    return np.arange(n) / n


@dataclass(frozen=True)
class StableRankReport:
    empirical: float
    theoretical: float | None
    matrix_shape: tuple[int, int]
    embedder: Embedder

    def csv_row(self) -> dict:
        n, d = self.matrix_shape
        return dict(
            embedder=self.embedder.kind,
            N=n,
            d=d,
            sigma=self.embedder.sigma if self.embedder.sigma is not None else "",
            empirical_sr=self.empirical,
            theoretical_sr="" if self.theoretical is None else self.theoretical,
        )


def stable_rank_report(e: Embedder, n: int, d: int, coords=None) -> StableRankReport:
    coords = analysis_grid(n) if coords is None else coords
    m = embed_matrix(e, coords, d)
    return StableRankReport(stable_rank(m.data), theoretical_stable_rank(e, len(coords)), m.shape, e)


# --- distance preservation --------------------------------------------------


def analytic_distance(e: Embedder, deltas) -> np.ndarray | None:
    """Closed-form normalized embedded distance ``D(x, x+delta) / D(x, x)``, when known."""
    dl = np.abs(np.asarray(deltas, dtype=np.float64))
    if e.kind == "gaussian":
        return np.exp(-dl * dl / (4.0 * e.sigma**2))
    if e.kind == "rff":
        return np.exp(-2.0 * math.pi**2 * e.sigma**2 * dl * dl)
    if e.kind == "square":
        halves = 2.0 / e.period
        if abs(halves - round(halves)) > 1e-12:
            return None
        # triangle wave: the domain holds a whole number of half periods
        p = e.period
        folded = np.abs(np.mod(dl + p / 2, p) - p / 2)
        return 1.0 - 4.0 * folded / p
    if e.kind == "sine":
        if abs(2 * e.freq - round(2 * e.freq)) > 1e-12:
            return None
        return np.cos(2.0 * math.pi * e.freq * dl)
    if e.kind == "impulse":
        return (dl == 0).astype(np.float64)
    return None


def embedded_similarity(e: Embedder, x1, x2, d: int) -> np.ndarray:
    """Sampled inner products normalized by ``sqrt(D(x1,x1) D(x2,x2))``; symmetric in its arguments."""
    a = embed_matrix(e, np.atleast_1d(x1), d).data
    b = embed_matrix(e, np.atleast_1d(x2), d).data
    raw = np.sum(a * b, axis=1)
    na = np.sum(a * a, axis=1)
    nb = np.sum(b * b, axis=1)
    return raw / np.sqrt(na * nb)


@dataclass(frozen=True)
class DistanceProfile:
    deltas: np.ndarray
    empirical: np.ndarray
    analytic: np.ndarray | None
    raw: np.ndarray
    embedder: Embedder
    d: int

    def csv_rows(self) -> list[dict]:
        rows = []
        for i, delta in enumerate(self.deltas):
            rows.append(
                dict(
                    embedder=self.embedder.kind,
                    delta=float(delta),
                    empirical_D=float(self.empirical[i]),
                    analytic_D="" if self.analytic is None else float(self.analytic[i]),
                )
            )
        return rows

    def sup_error(self) -> float:
        if self.analytic is None:
            raise ValueError(f"no closed-form distance for {self.embedder.label}")
        return float(np.max(np.abs(self.empirical - self.analytic)))


def distance_profile(e: Embedder, d: int, x0: float, deltas) -> DistanceProfile:
    deltas = np.asarray(deltas, dtype=np.float64)
    if np.any(deltas < 0):
        raise ValueError("deltas must be non-negative")
    lo, hi = (4.0 * e.sigma, 1.0 - 4.0 * e.sigma) if e.kind == "gaussian" else (0.0, 1.0)
    if x0 < lo or x0 + deltas.max(initial=0.0) > hi:
        top = hi - deltas.max(initial=0.0)
        hint = f"choose x0 in [{lo:.4g}, {top:.4g}]" if top >= lo else "shrink the largest delta"
        raise ValueError(f"x0={x0:g} with max delta {deltas.max(initial=0.0):g} leaves [{lo:.4g}, {hi:.4g}]; {hint}")
    a = embed_matrix(e, [x0], d).data[0]
    b = embed_matrix(e, x0 + deltas, d).data
    raw = b @ a
    empirical = embedded_similarity(e, np.full(deltas.size, x0), x0 + deltas, d)
    analytic = analytic_distance(e, deltas)
    return DistanceProfile(deltas, empirical, analytic, raw, e, d)


def rff_mean_profile(sigma: float, d: int, deltas, seeds) -> np.ndarray:
    """Seed-averaged normalized RFF similarity ``mean_j cos(2 pi b_j delta)``."""
    deltas = np.asarray(deltas, dtype=np.float64)
    curves = []
    for seed in seeds:
        b = rff_frequencies(Embedder.rff(sigma, seed), d)
        curves.append(np.cos(2 * math.pi * deltas[:, None] * b[None, :]).mean(axis=1))
    return np.mean(curves, axis=0)


# --- closed forms and oracles ----------------------------------------------


def circulant_singular_values(first_row) -> np.ndarray:
    """Singular values of the circulant with this first row: ``|DFT(first_row)|``, descending."""
    c = np.asarray(first_row, dtype=np.float64)
    if c.ndim != 1 or c.size < 2:
        raise ValueError("first row must be a vector of length >= 2")
    return np.sort(np.abs(np.fft.fft(c)))[::-1]


def circulant(first_row) -> np.ndarray:
    """Explicit circulant whose rows are cyclic right-shifts of ``first_row``."""
    c = np.asarray(first_row, dtype=np.float64)
    d = c.size
    return c[(np.arange(d)[None, :] - np.arange(d)[:, None]) % d]


def equivalent_sigma(sigma_g: float) -> float:
    """RFF frequency std whose stable rank matches a Gaussian embedder of width ``sigma_g``.

    Solves ``1/(2 sqrt(pi) sigma_g) = sqrt(2 pi) sigma_f``. The map is its own inverse.
    The product ``sigma_g * sigma_f`` is always about 0.1125, so ``sigma_g = 0.01`` pairs
    with ``sigma_f`` near 11.25.
    """
    if sigma_g <= 0:
        raise ValueError("sigma must be positive")
    return 1.0 / (2.0 * math.sqrt(2.0) * math.pi * sigma_g)


def preserved_interval(sigma: float, k: float) -> float:
    """Length over which a Gaussian embedder keeps ``D >= 10**-k``."""
    if sigma <= 0 or k <= 0:
        raise ValueError("sigma and k must be positive")
    return 2.0 * sigma * math.sqrt(k * LN10)


def sigma_for_interval(length: float, k: float) -> float:
    return length / (2.0 * math.sqrt(k * LN10))


def heuristic_sigma(n_train: int, k: float = 1.6) -> float:
    """Gaussian width preserving distance over half the training spacing, ``1/(4N sqrt(k ln 10))``."""
    return sigma_for_interval(1.0 / (2.0 * n_train), k)


def heuristic_sigma_2d(d: int, k: float = 3.5) -> float:
    """Empirical best width for 2-D Gaussian embeddings with ``d`` samples per direction."""
    return k / (4.0 * d * math.sqrt(LN10))
