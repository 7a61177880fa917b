"""Full multimodal predictor: featurization, model, training."""

from .features import (
    FEATURE_NAMES,
    AtomFeatureConfig,
    UnknownElementError,
    adjacency_and_orders,
    featurize_atoms,
)
from .predictor import (
    CompiledMolecules,
    MissingEmbeddingError,
    ModelConfig,
    ModelError,
    Prediction,
    Predictor,
    loss,
)
from .train import (
    PreparedData,
    TrainConfig,
    TrainResult,
    evaluate_loss,
    predict_scores,
    prepare_data,
    train_model,
)

__all__ = [
    "AtomFeatureConfig",
    "CompiledMolecules",
    "FEATURE_NAMES",
    "MissingEmbeddingError",
    "ModelConfig",
    "ModelError",
    "Prediction",
    "Predictor",
    "PreparedData",
    "TrainConfig",
    "TrainResult",
    "UnknownElementError",
    "adjacency_and_orders",
    "evaluate_loss",
    "featurize_atoms",
    "loss",
    "predict_scores",
    "prepare_data",
    "train_model",
]
