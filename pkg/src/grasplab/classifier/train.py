"""Restart-based training with best-validation selection.

Each restart draws a fresh 50/25/25 split and fresh weights, runs
full-batch SCG with early stopping on validation loss, and the restart
with the highest validation accuracy wins (ties break on validation loss,
then restart index).
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..actions import GraspType
from ..vision import DatasetStore, flatten_image
from .mlp import DEFAULT_LAYERS, MlpModel, loss_and_grad, save_model
from .scg import ScgOptimizer


class InsufficientDataError(ValueError):
    pass


@dataclass
class RestartStats:
    restart: int
    train_loss: float
    val_loss: float
    val_accuracy: float
    epochs: int


@dataclass
class TrainReport:
    runs: list[RestartStats]
    chosen: int
    wall_time_s: float
    seed: int

    def to_text(self) -> str:
        lines = [f"seed={self.seed}"]
        for r in self.runs:
            lines.append(
                f"restart={r.restart}\ttrain_loss={r.train_loss:.6f}"
                f"\tval_loss={r.val_loss:.6f}\tval_accuracy={r.val_accuracy:.4f}"
                f"\tepochs={r.epochs}")
        lines.append(f"chosen={self.chosen}")
        lines.append(f"wall_time_s={self.wall_time_s:.3f}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())


def store_arrays(store: DatasetStore, dtype=np.float64):
    """Flattened inputs, one-hot targets, and the id->row map for a store."""
    n = len(store.examples)
    x = np.empty((n, DEFAULT_LAYERS[0]), dtype=dtype)
    y = np.zeros((n, len(GraspType)), dtype=dtype)
    id_to_row = {}
    for row, ex in enumerate(store.examples):
        x[row] = flatten_image(ex.image)
        y[row, ex.label.index] = 1.0
        id_to_row[ex.example_id] = row
    return x, y, id_to_row


def evaluate(model: MlpModel, x: np.ndarray, y: np.ndarray):
    """(mean cross-entropy, accuracy) of a model over a labeled batch."""
    loss, _ = loss_and_grad(model, x.astype(model.dtype), y.astype(model.dtype),
                            need_grad=False)
    preds = model.forward_batch(x.astype(model.dtype)).argmax(axis=1)
    acc = float((preds == y.argmax(axis=1)).mean())
    return loss, acc


def _check_store(store: DatasetStore) -> None:
    counts = store.count_by_label()
    if not counts:
        raise InsufficientDataError("store is empty")
    thin = [g.value for g, c in counts.items() if c < 2]
    if thin:
        raise InsufficientDataError(
            f"need at least 2 examples per present class, short: {thin}")


def train_scg(store: DatasetStore, restarts: int = 5, max_epochs: int = 200,
              patience: int = 20, seed: int = 0, layers=DEFAULT_LAYERS,
              activation: str = "logistic", dtype=np.float32,
              min_epochs: int = 10, val_loss_target: float | None = None,
              model_path: str | Path | None = None):
    """Train on the store; returns (best model, report).

    Training math runs in ``dtype`` (float32 by default for speed); the
    returned model is float64.  Fully deterministic for a fixed seed.
    Early stopping never fires before min_epochs (validation loss often
    bumps while the net is still finding the class structure), and an
    optional val_loss_target ends a restart as soon as validation is good
    enough, which is how the experiment runner keeps batch studies quick.
    """
    _check_store(store)
    t0 = time.perf_counter()
    x_all, y_all, id_to_row = store_arrays(store, dtype=dtype)

    seeds = np.random.SeedSequence(seed).generate_state(2 * restarts)
    runs: list[RestartStats] = []
    best_models: list[MlpModel] = []

    for r in range(restarts):
        split = store.draw_split(int(seeds[2 * r]))
        rows = {k: np.array([id_to_row[i] for i in v], dtype=int)
                for k, v in split.items()}
        x_tr, y_tr = x_all[rows["train"]], y_all[rows["train"]]
        x_val, y_val = x_all[rows["val"]], y_all[rows["val"]]
        have_val = len(rows["val"]) > 0

        model = MlpModel.init_random(layers, seed=int(seeds[2 * r + 1]),
                                     activation=activation, dtype=dtype)
        shapes = [w.shape for w in model.weights]

        def fun(vec, need_grad=True, m=model):
            m.set_vector(vec)
            return loss_and_grad(m, x_tr, y_tr, need_grad=need_grad)

        opt = ScgOptimizer(lambda v: fun(v), model.get_vector())

        best_val = np.inf
        best_vec = opt.x.copy()
        best_epoch = 0
        since_best = 0
        epochs = 0
        for epoch in range(1, max_epochs + 1):
            res = opt.step()
            epochs = epoch
            if res.converged:
                break
            if not res.accepted:
                continue
            if have_val:
                model.set_vector(opt.x)
                val_loss, _ = evaluate(model, x_val, y_val)
            else:
                val_loss = res.loss
            if val_loss < best_val - 1e-12:
                best_val = val_loss
                best_vec = opt.x.copy()
                best_epoch = epoch
                since_best = 0
                if val_loss_target is not None and best_val <= val_loss_target:
                    break
            else:
                since_best += 1
                if epoch >= min_epochs and since_best >= patience:
                    break

        model.set_vector(best_vec)
        train_loss, _ = evaluate(model, x_tr, y_tr)
        if have_val:
            val_loss, val_acc = evaluate(model, x_val, y_val)
        else:
            val_loss, val_acc = train_loss, float("nan")
        runs.append(RestartStats(r, train_loss, val_loss, val_acc, epochs))
        best_models.append(model.astype(np.float64))

    # maximal val accuracy; ties -> lowest val loss, then lowest index
    chosen = min(range(restarts),
                 key=lambda i: (-runs[i].val_accuracy, runs[i].val_loss, i))
    report = TrainReport(runs, chosen, time.perf_counter() - t0, seed)
    best = best_models[chosen]
    if model_path is not None:
        save_model(best, model_path)
        Path(model_path).with_suffix(".report.txt").write_text(report.to_text())
    return best, report


def retrain_with(store: DatasetStore, new_examples, model_path=None, **train_kw):
    """Append new labeled examples and train from scratch on the result.

    new_examples: iterable of (image, label, source) or LabeledExample.
    The model file, when given, is only replaced once the new model is
    written out completely (write-then-rename).
    """
    for ex in new_examples:
        if hasattr(ex, "image"):
            store.add_example(ex.image, ex.label, ex.source, ex.timestamp,
                              ex.render_seed)
        else:
            image, label, source = ex
            store.add_example(image, label, source)
    return train_scg(store, model_path=model_path, **train_kw)
