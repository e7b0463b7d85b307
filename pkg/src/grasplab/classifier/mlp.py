"""Feed-forward network mapping a vectorized 80x60 RGB frame to six grasp
posteriors.

Architecture: 14400 inputs, two hidden layers of 300 and 50 units with a
bounded sigmoid-family activation (logistic by default, tanh selectable),
and a softmax output head trained under mean cross-entropy.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import expit

from ..vision import N_FEATURES, check_image, flatten_image

DEFAULT_LAYERS = (N_FEATURES, 300, 50, 6)

# activation id -> (fn, derivative expressed via the activation value)
_ACTIVATIONS = {
    "logistic": (lambda z: expit(z), lambda a: a * (1.0 - a)),
    "tanh": (np.tanh, lambda a: 1.0 - a * a),
}
_ACTIVATION_IDS = {"logistic": 1, "tanh": 2}
_ACTIVATION_NAMES = {v: k for k, v in _ACTIVATION_IDS.items()}


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


@dataclass
class MlpModel:
    weights: list[np.ndarray]   # per layer, shape (fan_in, fan_out)
    biases: list[np.ndarray]    # per layer, shape (fan_out,)
    activation: str = "logistic"

    def __post_init__(self):
        if self.activation not in _ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        sizes = self.layer_sizes
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (sizes[i], sizes[i + 1]) or b.shape != (sizes[i + 1],):
                raise ValueError("weight shapes inconsistent with layer sizes")

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return tuple([self.weights[0].shape[0]] + [w.shape[1] for w in self.weights])

    @classmethod
    def zeros(cls, layers=DEFAULT_LAYERS, activation="logistic", dtype=np.float64):
        ws = [np.zeros((a, b), dtype=dtype) for a, b in zip(layers, layers[1:])]
        bs = [np.zeros(b, dtype=dtype) for b in layers[1:]]
        return cls(ws, bs, activation)

    @classmethod
    def init_random(cls, layers=DEFAULT_LAYERS, seed=0, activation="logistic",
                    dtype=np.float64):
        """Scaled-uniform init: weights drawn from +-1/sqrt(fan_in)."""
        rng = np.random.default_rng(seed)
        ws, bs = [], []
        for a, b in zip(layers, layers[1:]):
            lim = 1.0 / np.sqrt(a)
            ws.append(rng.uniform(-lim, lim, size=(a, b)).astype(dtype))
            bs.append(np.zeros(b, dtype=dtype))
        return cls(ws, bs, activation)

    @property
    def dtype(self):
        return self.weights[0].dtype

    def astype(self, dtype) -> "MlpModel":
        return MlpModel([w.astype(dtype) for w in self.weights],
                        [b.astype(dtype) for b in self.biases], self.activation)

    def n_params(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    def get_vector(self) -> np.ndarray:
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.reshape(-1))
            parts.append(b)
        return np.concatenate(parts)

    def set_vector(self, vec: np.ndarray) -> None:
        k = 0
        for w, b in zip(self.weights, self.biases):
            w[...] = vec[k:k + w.size].reshape(w.shape)
            k += w.size
            b[...] = vec[k:k + b.size]
            k += b.size
        if k != vec.size:
            raise ValueError("parameter vector length mismatch")

    def forward_batch(self, x: np.ndarray) -> np.ndarray:
        """Posteriors for a batch of flattened inputs, shape (n, 6)."""
        act, _ = _ACTIVATIONS[self.activation]
        a = x
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            a = act(a @ w + b)
        return softmax(a @ self.weights[-1] + self.biases[-1])

    def posterior(self, image: np.ndarray) -> np.ndarray:
        check_image(image)
        x = flatten_image(image).astype(self.dtype)[None, :]
        return self.forward_batch(x)[0].astype(np.float64)


def forward(model: MlpModel, image: np.ndarray) -> np.ndarray:
    """Posterior probability of each grasp for one 80x60 RGB frame."""
    return model.posterior(image)


def loss_and_grad(model: MlpModel, x: np.ndarray, y: np.ndarray,
                  need_grad: bool = True):
    """Mean softmax cross-entropy and its gradient over all parameters.

    x: (n, d) inputs; y: (n, 6) one-hot targets.  The gradient is returned
    as one flat vector aligned with ``get_vector``.
    """
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("batch must be non-empty with shape (n, d)")
    act, dact = _ACTIVATIONS[model.activation]
    n = x.shape[0]

    acts = [x]
    a = x
    for w, b in zip(model.weights[:-1], model.biases[:-1]):
        a = act(a @ w + b)
        acts.append(a)
    logits = a @ model.weights[-1] + model.biases[-1]
    probs = softmax(logits)
    # log-sum-exp form keeps the loss finite for confident wrong predictions;
    # float64 accumulation keeps tiny full-batch reductions resolvable even
    # when the network math runs in float32
    zmax = logits.max(axis=1, keepdims=True)
    logz = zmax + np.log(np.exp(logits - zmax).sum(axis=1, keepdims=True))
    loss = float(np.mean((logz - logits)[y.astype(bool)], dtype=np.float64))
    if not need_grad:
        return loss, None

    grads_w = [None] * len(model.weights)
    grads_b = [None] * len(model.biases)
    delta = (probs - y) / n
    for layer in range(len(model.weights) - 1, -1, -1):
        grads_w[layer] = acts[layer].T @ delta
        grads_b[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ model.weights[layer].T) * dact(acts[layer])

    flat = []
    for gw, gb in zip(grads_w, grads_b):
        flat.append(gw.reshape(-1))
        flat.append(gb)
    return loss, np.concatenate(flat)


# Model file: magic, version, activation id, layer count and sizes, then all
# weights and biases as little-endian float64, row-major, layer by layer.
_MAGIC = b"GLABMLP1"


def save_model(model: MlpModel, path: str | Path) -> None:
    path = Path(path)
    sizes = model.layer_sizes
    header = _MAGIC + struct.pack("<III", 1, _ACTIVATION_IDS[model.activation],
                                  len(sizes))
    header += struct.pack(f"<{len(sizes)}I", *sizes)
    body = bytearray()
    for w, b in zip(model.weights, model.biases):
        body += np.ascontiguousarray(w, dtype="<f8").tobytes()
        body += np.ascontiguousarray(b, dtype="<f8").tobytes()
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(header + bytes(body))
    tmp.replace(path)  # atomic on POSIX


def load_model(path: str | Path) -> MlpModel:
    raw = Path(path).read_bytes()
    if raw[:8] != _MAGIC:
        raise ValueError(f"not a model file: {path}")
    version, act_id, n_sizes = struct.unpack_from("<III", raw, 8)
    if version != 1:
        raise ValueError(f"unsupported model version {version}")
    sizes = struct.unpack_from(f"<{n_sizes}I", raw, 20)
    off = 20 + 4 * n_sizes
    ws, bs = [], []
    for a, b in zip(sizes, sizes[1:]):
        w = np.frombuffer(raw, dtype="<f8", count=a * b, offset=off).reshape(a, b)
        off += 8 * a * b
        bias = np.frombuffer(raw, dtype="<f8", count=b, offset=off)
        off += 8 * b
        ws.append(w.copy())
        bs.append(bias.copy())
    return MlpModel(ws, bs, _ACTIVATION_NAMES[act_id])
