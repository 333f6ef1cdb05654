"""Linear and ReLU-MLP learners trained with full-batch Adam on mean squared error."""

from __future__ import annotations

import csv
import io
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse

from .signal import psnr
from .spectral import stable_rank


class DivergenceError(RuntimeError):
    def __init__(self, last_finite_epoch: int):
        super().__init__(f"training diverged after epoch {last_finite_epoch} (loss became non-finite)")
        self.last_finite_epoch = last_finite_epoch


class SingularSystemError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 4000
    learning_rate: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    log_every: int = 10
    track_layer_ranks_every: int | None = None

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not self.learning_rate > 0:
            raise ValueError(f"learning rate must be positive, got {self.learning_rate}")
        if self.log_every < 1:
            raise ValueError("log_every must be >= 1")


@dataclass
class TrainTrace:
    epochs: list[int] = field(default_factory=list)
    train_psnr: list[float] = field(default_factory=list)
    test_psnr: list[float | None] = field(default_factory=list)
    layer_ranks: list[np.ndarray | None] = field(default_factory=list)
    losses: list[float] = field(default_factory=list)

    def log(self, epoch, loss, train, test, ranks=None):
        self.epochs.append(epoch)
        self.losses.append(loss)
        self.train_psnr.append(train)
        self.test_psnr.append(test)
        self.layer_ranks.append(ranks)

    @property
    def final_train_psnr(self) -> float:
        return self.train_psnr[-1]

    @property
    def final_test_psnr(self) -> float | None:
        return self.test_psnr[-1]

    def to_csv(self, comments: list[str] | None = None) -> str:
        k = max((len(r) for r in self.layer_ranks if r is not None), default=0)
        buf = io.StringIO()
        for c in comments or []:
            buf.write(f"# {c}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["epoch", "train_psnr", "test_psnr"] + [f"sr_layer{i + 1}" for i in range(k)])
        for epoch, tr, te, ranks in zip(self.epochs, self.train_psnr, self.test_psnr, self.layer_ranks):
            sr = [repr(float(v)) for v in ranks] if ranks is not None else [""] * k
            writer.writerow([epoch, repr(tr), "" if te is None else repr(te)] + sr)
        return buf.getvalue()


def evaluate_psnr(prediction, target) -> float:
    """PSNR with predictions clamped to the valid amplitude range."""
    return psnr(np.clip(prediction, 0.0, 1.0), target)


class Adam:
    def __init__(self, params: list[np.ndarray], cfg: TrainConfig):
        self.params = params
        self.cfg = cfg
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads: list[np.ndarray]):
        cfg = self.cfg
        self.t += 1
        c1 = 1.0 - cfg.beta1**self.t
        c2 = 1.0 - cfg.beta2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= cfg.beta1
            m += (1.0 - cfg.beta1) * g
            v *= cfg.beta2
            v += (1.0 - cfg.beta2) * (g * g)
            p -= cfg.learning_rate * (m / c1) / (np.sqrt(v / c2) + cfg.eps)


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int, shape) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


# --- linear model -----------------------------------------------------------


@dataclass
class LinearModel:
    w: np.ndarray
    b: float

    def predict(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.w.size:
            raise ValueError(f"model fitted on d={self.w.size}, got inputs of width {x.shape[-1]}")
        return x @ self.w + self.b


def _as_xy(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.ndim != 2 or x.shape[0] != y.size:
        raise ValueError(f"design matrix {x.shape} does not match {y.size} targets")
    return x, y


def fit_linear_closed_form(x, y, ridge: float = 0.0) -> LinearModel:
    """Minimize ``||Xw + b - y||^2 + ridge ||w||^2`` (the bias is not penalized).

    With ``ridge == 0`` the minimum-norm least-squares solution is returned; this
    interpolates exactly when ``[X, 1]`` has full row rank. A ``[X, 1]`` with
    neither full row nor full column rank is rejected.
    """
    x, y = _as_xy(x, y)
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    n, d = x.shape
    if ridge == 0.0:
        aug = np.hstack([x, np.ones((n, 1))])
        sol, _, rank, _ = np.linalg.lstsq(aug, y, rcond=None)
        if rank < min(n, d + 1):
            raise SingularSystemError(
                f"embedding system is rank deficient (rank {rank} < {min(n, d + 1)}); use ridge > 0"
            )
        return LinearModel(sol[:d], float(sol[d]))
    mean_x = x.mean(axis=0)
    mean_y = y.mean()
    xc = x - mean_x
    yc = y - mean_y
    if d <= n:
        w = np.linalg.solve(xc.T @ xc + ridge * np.eye(d), xc.T @ yc)
    else:
        w = xc.T @ np.linalg.solve(xc @ xc.T + ridge * np.eye(n), yc)
    return LinearModel(w, float(mean_y - mean_x @ w))


LINEAR_INITS = ("zeros", "glorot")


def fit_linear_adam(
    x, y, cfg: TrainConfig, x_test=None, y_test=None, init: str = "zeros"
) -> tuple[LinearModel, TrainTrace]:
    """Full-batch Adam on the mean squared error of ``x @ w + b``.

    ``init="zeros"`` starts from the minimum-norm point, so weight directions the
    training rows never touch stay at zero. ``"glorot"`` draws uniform weights from
    the config seed; that random residue survives training and shows up at test
    coordinates as a noise floor.
    """
    if init not in LINEAR_INITS:
        raise ValueError(f"init must be one of {LINEAR_INITS}, got {init!r}")
    x, y = _as_xy(x, y)
    n, d = x.shape
    rng = np.random.default_rng(cfg.seed)
    w = glorot_uniform(rng, d, 1, d) if init == "glorot" else np.zeros(d)
    b = np.zeros(1)
    opt = Adam([w, b], cfg)
    trace = TrainTrace()
    has_test = x_test is not None and len(y_test) > 0

    def record(epoch, resid):
        pred = y + resid
        test = evaluate_psnr(x_test @ w + b[0], y_test) if has_test else None
        trace.log(epoch, float(np.mean(resid * resid)), evaluate_psnr(pred, y), test)

    scale = 2.0 / n
    last_finite = 0
    for epoch in range(cfg.epochs + 1):
        resid = x @ w + (b[0] - y)
        loss = float(resid @ resid)
        if not math.isfinite(loss):
            raise DivergenceError(last_finite)
        last_finite = epoch
        if epoch % cfg.log_every == 0 or epoch == cfg.epochs:
            record(epoch, resid)
        if epoch == cfg.epochs:
            break
        opt.step([scale * (x.T @ resid), np.array([scale * resid.sum()])])
    return LinearModel(w, float(b[0])), trace


# --- MLP --------------------------------------------------------------------


@dataclass(frozen=True)
class TabulatedInput:
    """A batch whose row ``n`` is ``concat(tables[k][indices[k][n]] for k)``.

    Separable and multi-direction 2-D embeddings of pixel grids repeat the same
    few per-axis vectors many times. Keeping them as tables lets the first MLP
    layer run on the tables (``(T @ W)[idx]``) instead of the dense batch; the
    result is identical to feeding :meth:`dense`.
    """

    tables: tuple[np.ndarray, ...]
    indices: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.tables) != len(self.indices) or not self.tables:
            raise ValueError("need one index vector per table")
        sizes = {len(i) for i in self.indices}
        if len(sizes) != 1:
            raise ValueError("index vectors must have equal length")
        for t, i in zip(self.tables, self.indices):
            if t.ndim != 2 or (len(i) and (i.min() < 0 or i.max() >= t.shape[0])):
                raise ValueError("indices out of range for their table")

    def __len__(self) -> int:
        return len(self.indices[0])

    @property
    def width(self) -> int:
        return sum(t.shape[1] for t in self.tables)

    def take(self, rows) -> "TabulatedInput":
        rows = np.asarray(rows)
        return TabulatedInput(self.tables, tuple(i[rows] for i in self.indices))

    def dense(self) -> np.ndarray:
        return np.concatenate([t[i] for t, i in zip(self.tables, self.indices)], axis=1)

    def first_layer(self, w: np.ndarray) -> np.ndarray:
        out, start = None, 0
        for t, i in zip(self.tables, self.indices):
            part = (t @ w[start : start + t.shape[1]])[i]
            out = part if out is None else out + part
            start += t.shape[1]
        return out

    def first_layer_grad(self, delta: np.ndarray) -> np.ndarray:
        """``dense().T @ delta`` without building the dense batch."""
        blocks = []
        n = len(self)
        for t, i in zip(self.tables, self.indices):
            scatter = sparse.csr_matrix((np.ones(n), (i, np.arange(n))), shape=(t.shape[0], n))
            blocks.append(t.T @ (scatter @ delta))
        return np.concatenate(blocks, axis=0)



@dataclass
class Mlp:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ValueError("need one bias vector per weight matrix")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise ValueError(f"layer {i}: weight {w.shape} and bias {b.shape} do not match")
            if i and self.weights[i - 1].shape[1] != w.shape[0]:
                raise ValueError(f"layer {i}: input width {w.shape[0]} != previous output {self.weights[i - 1].shape[1]}")

    @classmethod
    def init(cls, widths, seed: int = 0) -> "Mlp":
        """Glorot-uniform weights and zero biases; ``widths`` like ``[d, 256, 256, 256, 1]``."""
        widths = list(widths)
        if len(widths) < 2:
            raise ValueError("an MLP needs at least input and output widths")
        rng = np.random.default_rng(seed)
        weights = [glorot_uniform(rng, a, b, (a, b)) for a, b in zip(widths[:-1], widths[1:])]
        biases = [np.zeros(b) for b in widths[1:]]
        return cls(weights, biases)

    @classmethod
    def zeros(cls, widths) -> "Mlp":
        widths = list(widths)
        return cls([np.zeros((a, b)) for a, b in zip(widths[:-1], widths[1:])], [np.zeros(b) for b in widths[1:]])

    @property
    def widths(self) -> list[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    @property
    def params(self) -> list[np.ndarray]:
        return [p for pair in zip(self.weights, self.biases) for p in pair]

    def hidden_activations(self, inputs) -> list[np.ndarray]:
        x = self._check(inputs)
        acts = []
        for layer, (w, b) in enumerate(zip(self.weights[:-1], self.biases[:-1])):
            h = np.maximum(self._affine(layer, x if layer == 0 else h), 0.0)
            acts.append(h)
        return acts

    def _affine(self, layer: int, h) -> np.ndarray:
        w, b = self.weights[layer], self.biases[layer]
        if isinstance(h, TabulatedInput):
            return h.first_layer(w) + b
        return h @ w + b

    def _check(self, inputs):
        if isinstance(inputs, TabulatedInput):
            if inputs.width != self.widths[0]:
                raise ValueError(f"input width {inputs.width} != first layer width {self.widths[0]}")
            return inputs
        x = np.asarray(inputs, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None] if self.widths[0] == 1 else x[None, :]
        if x.shape[1] != self.widths[0]:
            raise ValueError(f"input width {x.shape[1]} != first layer width {self.widths[0]}")
        return x

    def forward(self, inputs) -> np.ndarray:
        h = self._check(inputs)
        last = len(self.weights) - 1
        for layer in range(last):
            h = np.maximum(self._affine(layer, h), 0.0)
        out = self._affine(last, h)
        return out[:, 0] if out.shape[1] == 1 else out

    def loss_and_grads(self, inputs, targets) -> tuple[float, list[np.ndarray]]:
        """MSE loss and its gradients, ordered like :attr:`params`."""
        x = self._check(inputs)
        y = np.asarray(targets, dtype=np.float64).reshape(len(x), -1)
        acts = [x]
        h = x
        last = len(self.weights) - 1
        for layer in range(last):
            h = np.maximum(self._affine(layer, h), 0.0)
            acts.append(h)
        out = self._affine(last, h)
        resid = out - y
        loss = float(np.mean(resid * resid))
        delta = (2.0 / resid.size) * resid
        grads = []
        for layer in range(len(self.weights) - 1, -1, -1):
            a = acts[layer]
            grads.append(delta.sum(axis=0))
            grads.append(a.first_layer_grad(delta) if isinstance(a, TabulatedInput) else a.T @ delta)
            if layer:
                delta = (delta @ self.weights[layer].T) * (a > 0)
        grads.reverse()
        return loss, grads


def mlp_forward(m: Mlp, inputs) -> np.ndarray:
    return m.forward(inputs)


def layer_stable_ranks(m: Mlp, inputs) -> np.ndarray:
    """Stable rank of each post-ReLU hidden activation matrix; 0 for an all-zero layer."""
    x = m._check(inputs)
    if len(x) == 0:
        raise ValueError("need a non-empty batch")
    out = []
    for a in m.hidden_activations(x):
        out.append(0.0 if not np.any(a) else stable_rank(a))
    return np.asarray(out)


def mlp_train(m: Mlp, x, y, x_test=None, y_test=None, cfg: TrainConfig = TrainConfig(epochs=2000)) -> TrainTrace:
    """Full-batch Adam on ``m`` in place; returns the logged trace."""
    x = m._check(x)
    y = np.asarray(y, dtype=np.float64).ravel()
    if len(y) != len(x):
        raise ValueError(f"{len(x)} inputs but {len(y)} targets")
    has_test = x_test is not None and len(y_test) > 0
    opt = Adam(m.params, cfg)
    trace = TrainTrace()
    rank_every = cfg.track_layer_ranks_every
    last_finite = 0
    for epoch in range(cfg.epochs + 1):
        loss, grads = m.loss_and_grads(x, y)
        if not math.isfinite(loss) or not all(np.all(np.isfinite(g)) for g in grads):
            raise DivergenceError(last_finite)
        last_finite = epoch
        final = epoch == cfg.epochs
        if epoch % cfg.log_every == 0 or final:
            ranks = None
            if rank_every is not None and (epoch % rank_every == 0 or final):
                ranks = layer_stable_ranks(m, x)
            test = evaluate_psnr(m.forward(x_test), y_test) if has_test else None
            trace.log(epoch, loss, evaluate_psnr(m.forward(x), y), test, ranks)
        if final:
            break
        opt.step(grads)
    return trace


# --- checkpoints ------------------------------------------------------------

_MAGIC = b"PEMLP\x01"


def save_mlp(path, m: Mlp) -> None:
    """Flat binary: magic, array count, then per array ndim, dims and row-major little-endian float64."""
    chunks = [_MAGIC, struct.pack("<I", len(m.params))]
    for p in m.params:
        chunks.append(struct.pack("<I", p.ndim) + struct.pack(f"<{p.ndim}I", *p.shape))
        chunks.append(np.ascontiguousarray(p, dtype="<f8").tobytes())
    Path(path).write_bytes(b"".join(chunks))


def load_mlp(path) -> Mlp:
    data = Path(path).read_bytes()
    if not data.startswith(_MAGIC):
        raise ValueError(f"{path} is not an MLP checkpoint")
    pos = len(_MAGIC)
    (count,) = struct.unpack_from("<I", data, pos)
    pos += 4
    arrays = []
    for _ in range(count):
        (ndim,) = struct.unpack_from("<I", data, pos)
        pos += 4
        shape = struct.unpack_from(f"<{ndim}I", data, pos)
        pos += 4 * ndim
        size = int(np.prod(shape)) * 8
        arrays.append(np.frombuffer(data[pos : pos + size], dtype="<f8").reshape(shape).astype(np.float64))
        pos += size
    return Mlp(arrays[0::2], arrays[1::2])
