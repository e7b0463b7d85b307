"""Grasp classifier: feed-forward network, batch optimizer, training harness."""
from .mlp import (
    MlpModel,
    DEFAULT_LAYERS,
    forward,
    loss_and_grad,
    save_model,
    load_model,
)
from .scg import ScgOptimizer, ScgState, scg_minimize
from .train import (
    TrainReport,
    RestartStats,
    train_scg,
    retrain_with,
    evaluate,
    store_arrays,
    InsufficientDataError,
)

__all__ = [
    "MlpModel", "DEFAULT_LAYERS", "forward", "loss_and_grad",
    "save_model", "load_model",
    "ScgOptimizer", "ScgState", "scg_minimize",
    "TrainReport", "RestartStats", "train_scg", "retrain_with",
    "evaluate", "store_arrays", "InsufficientDataError",
]
