"""Target signals: data model, file ingestion, train/test splits and PSNR."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

PSNR_CAP_DB = 120.0
_MSE_FLOOR = 1e-12


class SignalFormatError(ValueError):
    """Raised when a CSV or PGM file cannot be parsed."""


class NormalizationError(ValueError):
    """Raised when a signal cannot be min-max normalized (constant input)."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Signal1D:
    samples: np.ndarray
    coords: np.ndarray
    name: str = "signal"

    def __post_init__(self):
        samples = _readonly(self.samples)
        coords = _readonly(self.coords)
        if samples.ndim != 1 or coords.shape != samples.shape:
            raise ValueError("samples and coords must be 1-D vectors of equal length")
        if samples.size < 2:
            raise ValueError("a signal needs at least 2 samples")
        if not np.all(np.isfinite(samples)) or samples.min() < 0 or samples.max() > 1:
            raise ValueError("amplitudes must be finite and lie in [0, 1]")
        if coords[0] != 0.0 or coords[-1] != 1.0 or np.any(np.diff(coords) <= 0):
            raise ValueError("coords must increase strictly from 0 to 1")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_values(cls, values, name: str = "signal") -> "Signal1D":
        """Min-max normalize raw amplitudes and place them on an even [0, 1] grid."""
        samples = normalize(values)
        return cls(samples, grid_coords(samples.size), name)

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class Signal2D:
    grid: np.ndarray
    name: str = "image"

    def __post_init__(self):
        grid = _readonly(self.grid)
        if grid.ndim != 2 or min(grid.shape) < 2:
            raise ValueError("image must be an H x W matrix with H, W >= 2")
        if not np.all(np.isfinite(grid)) or grid.min() < 0 or grid.max() > 1:
            raise ValueError("pixel values must be finite and lie in [0, 1]")
        object.__setattr__(self, "grid", grid)

    @classmethod
    def from_values(cls, values, name: str = "image") -> "Signal2D":
        return cls(normalize(values), name)

    @property
    def shape(self) -> tuple[int, int]:
        return self.grid.shape

    def row(self, index: int) -> Signal1D:
        return Signal1D.from_values(self.grid[index], name=f"{self.name}[{index}]")


@dataclass(frozen=True)
class SplitSpec:
    """Train/test index scheme: ``even-odd``, ``stride`` (with ``k``) or ``all-train``."""

    scheme: str = "even-odd"
    k: int | None = None
    description: str = field(default="", compare=False)

    def __post_init__(self):
        if self.scheme not in ("even-odd", "stride", "all-train"):
            raise ValueError(f"unknown split scheme {self.scheme!r}")
        if self.scheme == "stride" and (self.k is None or self.k < 2):
            raise ValueError("stride split needs k >= 2")

    @classmethod
    def parse(cls, text: str) -> "SplitSpec":
        text = text.strip()
        if text in ("even-odd", "even-train-odd-test"):
            return cls("even-odd")
        if text == "all-train":
            return cls("all-train")
        m = re.fullmatch(r"stride\((\d+)\)", text)
        if m:
            return cls("stride", int(m.group(1)))
        raise ValueError(f"cannot parse split {text!r}")

    def __str__(self) -> str:
        return f"stride({self.k})" if self.scheme == "stride" else self.scheme


def grid_coords(n: int) -> np.ndarray:
    """``n`` equally spaced coordinates with both endpoints included."""
    return np.arange(n) / (n - 1)


def normalize(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise NormalizationError("signal is empty or contains non-finite values")
    lo, hi = v.min(), v.max()
    if hi <= lo:
        raise NormalizationError(f"constant signal (every value is {lo:g}) cannot be normalized")
    return (v - lo) / (hi - lo)


def split(signal: Signal1D | int, spec: SplitSpec = SplitSpec()) -> tuple[np.ndarray, np.ndarray]:
    n = signal if isinstance(signal, int) else len(signal)
    idx = np.arange(n)
    if spec.scheme == "all-train":
        return idx, idx[:0]
    k = 2 if spec.scheme == "even-odd" else spec.k
    if spec.scheme == "stride" and k >= n:
        raise ValueError(f"stride({k}) needs a signal longer than {k} samples, got {n}")
    mask = idx % k == 0
    return idx[mask], idx[~mask]


def split_2d(shape: tuple[int, int], spec: SplitSpec = SplitSpec()) -> tuple[np.ndarray, np.ndarray]:
    """Flat (row-major) train/test pixel indices: train pixels are train along both axes."""
    h, w = shape
    rows, _ = split(h, spec)
    cols, _ = split(w, spec)
    train = np.zeros((h, w), dtype=bool)
    train[np.ix_(rows, cols)] = True
    flat = train.ravel()
    return np.flatnonzero(flat), np.flatnonzero(~flat)


def psnr(prediction, target) -> float:
    """PSNR in dB for signals with peak 1.0; capped at 120 dB when MSE < 1e-12."""
    p = np.asarray(prediction, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if p.shape != t.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {t.shape}")
    if p.size == 0:
        raise ValueError("psnr needs at least one sample")
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(t))):
        raise ValueError("psnr inputs must be finite")
    mse = float(np.mean((p - t) ** 2))
    if mse < _MSE_FLOOR:
        return PSNR_CAP_DB
    return min(PSNR_CAP_DB, 10.0 * math.log10(1.0 / mse))


# --- file formats -----------------------------------------------------------


def _pgm_tokens(data: bytes):
    """Yield (token, end_offset) for the header, skipping ``#`` comments."""
    pos = 0
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            start = pos
            while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
                pos += 1
            yield data[start:pos], start, pos


def parse_pgm(data: bytes) -> tuple[np.ndarray, int]:
    """Decode P2/P5 bytes into an integer ``(H, W)`` array and its maxval."""
    tokens = _pgm_tokens(data)
    header = []
    try:
        for _ in range(4):
            header.append(next(tokens))
    except StopIteration:
        raise SignalFormatError(f"truncated PGM header at byte {len(data)}") from None
    magic, w_tok, h_tok, max_tok = header
    if magic[0] not in (b"P2", b"P5"):
        raise SignalFormatError(f"byte {magic[1]}: unsupported magic {magic[0]!r} (expected P2 or P5)")
    try:
        width, height, maxval = int(w_tok[0]), int(h_tok[0]), int(max_tok[0])
    except ValueError:
        raise SignalFormatError(f"byte {w_tok[1]}: non-integer PGM dimensions") from None
    if width < 1 or height < 1 or not 0 < maxval <= 65535:
        raise SignalFormatError(f"byte {w_tok[1]}: invalid size {width}x{height} or maxval {maxval}")
    count = width * height
    if magic[0] == b"P5":
        start = max_tok[2] + 1  # exactly one whitespace byte after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = count * dtype.itemsize
        raster = data[start : start + need]
        if len(raster) < need:
            raise SignalFormatError(f"byte {start + len(raster)}: raster ends early (need {need} bytes)")
        pixels = np.frombuffer(raster, dtype=dtype).astype(np.int64)
    else:
        values = []
        for tok, off, _ in tokens:
            try:
                values.append(int(tok))
            except ValueError:
                raise SignalFormatError(f"byte {off}: bad pixel value {tok!r}") from None
            if len(values) == count:
                break
        if len(values) < count:
            raise SignalFormatError(f"byte {len(data)}: expected {count} pixels, found {len(values)}")
        pixels = np.asarray(values, dtype=np.int64)
    if pixels.max(initial=0) > maxval:
        raise SignalFormatError(f"pixel value exceeds maxval {maxval}")
    return pixels.reshape(height, width), maxval


def read_pgm(path) -> tuple[np.ndarray, int]:
    return parse_pgm(Path(path).read_bytes())


def encode_pgm(grid, maxval: int = 255, comments: list[str] | None = None) -> bytes:
    """Binary P5 encoding of a ``[0, 1]`` image (values outside are clipped)."""
    g = np.clip(np.asarray(grid, dtype=np.float64), 0.0, 1.0)
    pix = np.rint(g * maxval).astype(np.int64)
    head = [b"P5"]
    for line in comments or []:
        for part in str(line).splitlines():
            head.append(b"# " + part.encode())
    head.append(f"{g.shape[1]} {g.shape[0]}".encode())
    head.append(str(maxval).encode())
    dtype = ">u2" if maxval > 255 else "u1"
    return b"\n".join(head) + b"\n" + pix.astype(dtype).tobytes()


def write_pgm(path, grid, maxval: int = 255, comments: list[str] | None = None) -> None:
    Path(path).write_bytes(encode_pgm(grid, maxval, comments))


def parse_csv(text: str) -> np.ndarray:
    """Parse a CSV of decimal amplitudes; ``#`` lines are comments.

    One value per line gives a 1-D vector; a single comma-separated line also
    gives a 1-D vector; several lines of several values give a row-major matrix.
    """
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError:
            raise SignalFormatError(f"line {lineno}: cannot parse {line!r} as numbers") from None
    if not rows:
        raise SignalFormatError("CSV contains no values")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise SignalFormatError(f"ragged CSV: row widths {sorted(widths)}")
    arr = np.asarray(rows, dtype=np.float64)
    if arr.shape[1] == 1 or arr.shape[0] == 1:
        return arr.ravel()
    return arr


def format_csv(values, comments: list[str] | None = None) -> str:
    """Inverse of :func:`parse_csv`, using ``repr`` floats so values round-trip."""
    arr = np.asarray(values, dtype=np.float64)
    lines = [f"# {c}" for c in comments or []]
    if arr.ndim == 1:
        lines += [repr(float(v)) for v in arr]
    else:
        lines += [",".join(repr(float(v)) for v in row) for row in arr]
    return "\n".join(lines) + "\n"


SUPPORTED_SUFFIXES = (".csv", ".pgm")


def _load_array(path) -> np.ndarray:
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".pgm":
        pixels, _ = read_pgm(path)
        return pixels.astype(np.float64)
    if suffix == ".csv":
        return parse_csv(path.read_text())
    raise SignalFormatError(
        f"unsupported format {suffix or '(none)'}; supported: {', '.join(SUPPORTED_SUFFIXES)}"
    )


def load_signal_1d(path, row_index: int | None = None) -> Signal1D:
    arr = _load_array(path)
    name = Path(path).stem
    if arr.ndim == 2:
        if row_index is None:
            raise SignalFormatError(f"{path} holds a {arr.shape[0]}x{arr.shape[1]} image; pass a row index")
        if not 0 <= row_index < arr.shape[0]:
            raise IndexError(f"row {row_index} outside image with {arr.shape[0]} rows")
        arr = arr[row_index]
        name = f"{name}[{row_index}]"
    return Signal1D.from_values(arr, name=name)


def load_signal_2d(path) -> Signal2D:
    arr = _load_array(path)
    if arr.ndim != 2:
        raise SignalFormatError(f"{path} holds a 1-D signal, not an image")
    return Signal2D.from_values(arr, name=Path(path).stem)
