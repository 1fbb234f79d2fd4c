"""Feature assembly, the linear scorer and validation statistics."""

from .features import (
    FEATURE_NAMES,
    SCHEMA_VERSION,
    DatasetSplit,
    FeatureVector,
    assemble_features,
    split_dataset,
    vectors_from_csv,
    vectors_to_csv,
)
from .model import (
    LinearModel,
    ScorePrediction,
    feature_correlation_matrix,
    feature_significance,
    fit_linear_model,
    predict_score,
)
from .stats import interrater_agreement, pearson_r, t_significance

__all__ = [
    "FEATURE_NAMES",
    "SCHEMA_VERSION",
    "DatasetSplit",
    "FeatureVector",
    "LinearModel",
    "ScorePrediction",
    "assemble_features",
    "feature_correlation_matrix",
    "feature_significance",
    "fit_linear_model",
    "interrater_agreement",
    "pearson_r",
    "predict_score",
    "split_dataset",
    "t_significance",
    "vectors_from_csv",
    "vectors_to_csv",
]
