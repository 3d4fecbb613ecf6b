"""Type inference models."""
from .embedding import FeatureEmbedding, IdentInitializer, VocabSizes
from .gnn import NODE_KIND_CODES, TypeFlowGNN, count_parameters, predictable_mask
from .model_config import PRESET_NAMES, GnnType, ModelConfig, preset
from .predict import predict, predict_rows

__all__ = [
    "FeatureEmbedding",
    "GnnType",
    "IdentInitializer",
    "ModelConfig",
    "NODE_KIND_CODES",
    "PRESET_NAMES",
    "TypeFlowGNN",
    "VocabSizes",
    "count_parameters",
    "predict",
    "predict_rows",
    "predictable_mask",
    "preset",
]
