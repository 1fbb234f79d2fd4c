"""Ridge scoring model on z-scored features, plus per-feature significance."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..errors import InsufficientDataError, SchemaMismatchError, ValidationError
from .features import FEATURE_NAMES, SCHEMA_VERSION, FeatureVector
from .stats import SCORE_MAX, SCORE_MIN, pearson_or_none, t_significance

DEFAULT_LAMBDA = 1.0


@dataclass(frozen=True)
class LinearModel:
    features: tuple[str, ...]
    weights: dict[str, float] = field(hash=False)  # per standardized unit
    intercept: float
    feature_means: dict[str, float] = field(hash=False)
    feature_stds: dict[str, float] = field(hash=False)
    lam: float = DEFAULT_LAMBDA
    schema_version: str = SCHEMA_VERSION
    training: dict = field(default_factory=dict, hash=False)

    def raw_coefficients(self) -> tuple[dict[str, float], float]:
        """Weights and intercept in original feature units."""
        coef = {n: self.weights[n] / self.feature_stds[n] for n in self.features}
        intercept = self.intercept - sum(coef[n] * self.feature_means[n] for n in self.features)
        return coef, intercept

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "features": list(self.features),
            "weights": [self.weights[n] for n in self.features],
            "intercept": self.intercept,
            "means": [self.feature_means[n] for n in self.features],
            "stds": [self.feature_stds[n] for n in self.features],
            "lambda": self.lam,
            "training": dict(self.training),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LinearModel":
        try:
            names = tuple(doc["features"])
            model = cls(
                features=names,
                weights=dict(zip(names, map(float, doc["weights"]))),
                intercept=float(doc["intercept"]),
                feature_means=dict(zip(names, map(float, doc["means"]))),
                feature_stds=dict(zip(names, map(float, doc["stds"]))),
                lam=float(doc["lambda"]),
                schema_version=str(doc["schema_version"]),
                training=dict(doc.get("training", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaMismatchError(f"malformed model document: {exc}") from exc
        if not (len(names) == len(doc["weights"]) == len(doc["means"]) == len(doc["stds"])):
            raise SchemaMismatchError("model arrays disagree in length")
        return model

    @classmethod
    def load(cls, path) -> "LinearModel":
        with open(path, encoding="utf-8") as fh:
            try:
                return cls.from_dict(json.load(fh))
            except json.JSONDecodeError as exc:
                raise SchemaMismatchError(f"{path}: not valid JSON: {exc}") from exc


def design_matrix(vectors: Sequence[FeatureVector], names: Sequence[str]) -> tuple[np.ndarray, np.ndarray, list[str], int]:
    """Rows with a manual score and every selected feature present.

    Returns (X, y, candidate_ids, n_dropped).
    """
    rows, targets, ids = [], [], []
    dropped = 0
    for v in vectors:
        if v.manual_score is None or v.missing(names):
            dropped += 1
            continue
        rows.append([float(v.features[n]) for n in names])
        targets.append(float(v.manual_score))
        ids.append(v.candidate_id)
    X = np.array(rows, dtype=np.float64).reshape(len(rows), len(names))
    return X, np.array(targets, dtype=np.float64), ids, dropped


def fit_linear_model(
    vectors: Sequence[FeatureVector],
    feature_subset: Sequence[str] = FEATURE_NAMES,
    lam: float = DEFAULT_LAMBDA,
    seed: Optional[int] = None,
) -> LinearModel:
    """Ridge regression on z-scored features with an unpenalized intercept.

    Solves (Z'Z + lam*I) w = Z'(y - mean(y)); because Z is centered the
    intercept is mean(y). Constant columns get std 1 so they contribute zero.
    """
    names = tuple(feature_subset)
    if not names:
        raise ValidationError("feature_subset is empty")
    if lam < 0:
        raise ValidationError("lambda must be non-negative")
    for v in vectors:
        unknown = [n for n in names if n not in v.features]
        if unknown:
            raise SchemaMismatchError(f"vector {v.candidate_id!r} lacks features {unknown}")

    X, y, _, dropped = design_matrix(vectors, names)
    if len(y) == 0:
        raise InsufficientDataError(f"all {dropped} rows dropped for absent features or scores")
    if len(y) < len(names) + 2:
        raise InsufficientDataError(f"{len(y)} usable rows for {len(names)} features; need {len(names) + 2}")

    means = X.mean(axis=0)
    stds = X.std(axis=0)
    constant = np.ptp(X, axis=0) == 0
    stds[constant] = 1.0
    Z = (X - means) / stds
    Z[:, constant] = 0.0
    y_mean = float(y.mean())
    gram = Z.T @ Z + lam * np.eye(len(names))
    w = np.linalg.lstsq(gram, Z.T @ (y - y_mean), rcond=None)[0] if lam == 0 else np.linalg.solve(gram, Z.T @ (y - y_mean))

    fitted = Z @ w + y_mean
    rmse = float(np.sqrt(np.mean((fitted - y) ** 2)))
    training = {"n": int(len(y)), "n_dropped": int(dropped), "rmse": rmse}
    if seed is not None:
        training["seed"] = int(seed)
    return LinearModel(
        features=names,
        weights=dict(zip(names, map(float, w))),
        intercept=y_mean,
        feature_means=dict(zip(names, map(float, means))),
        feature_stds=dict(zip(names, map(float, stds))),
        lam=float(lam),
        training=training,
    )


@dataclass(frozen=True)
class ScorePrediction:
    score: float
    raw: float
    imputed: tuple[str, ...] = ()


def predict_score(model: LinearModel, v: FeatureVector) -> ScorePrediction:
    """Linear prediction clamped to [1, 6]; absent features take the training mean."""
    if model.schema_version != v.schema_version:
        raise SchemaMismatchError(f"model schema {model.schema_version!r} vs vector schema {v.schema_version!r}")
    unknown = [n for n in model.features if n not in v.features]
    if unknown:
        raise SchemaMismatchError(f"vector lacks model features {unknown}")
    raw = model.intercept
    imputed = []
    for name in model.features:
        value = v.features[name]
        if value is None or not math.isfinite(value):
            imputed.append(name)
            continue
        raw += model.weights[name] * (value - model.feature_means[name]) / model.feature_stds[name]
    return ScorePrediction(min(float(SCORE_MAX), max(float(SCORE_MIN), raw)), raw, tuple(imputed))


def aggregate_scores(predictions: Sequence[ScorePrediction]) -> float:
    """Candidate-level score over several sentences: mean of per-sentence scores."""
    if not predictions:
        raise ValidationError("no predictions to aggregate")
    return sum(p.score for p in predictions) / len(predictions)


def rmse(model: LinearModel, vectors: Sequence[FeatureVector]) -> float:
    scored = [v for v in vectors if v.manual_score is not None]
    if not scored:
        raise InsufficientDataError("no scored vectors")
    errors = [predict_score(model, v).score - v.manual_score for v in scored]
    return float(np.sqrt(np.mean(np.square(errors))))


@dataclass(frozen=True)
class FeatureSignificance:
    feature: str
    n: int
    r: Optional[float]
    t: Optional[float]
    p_value: Optional[float]
    significant: bool


def feature_significance(
    vectors: Sequence[FeatureVector], names: Sequence[str] = FEATURE_NAMES, alpha: float = 0.05
) -> list[FeatureSignificance]:
    """Pearson r of each feature against manual score, with its t-test.

    Rows lacking the feature or a score are skipped per feature.
    """
    table = []
    for name in names:
        pairs = [
            (v.features[name], v.manual_score)
            for v in vectors
            if v.manual_score is not None and v.features.get(name) is not None
        ]
        n = len(pairs)
        r = pearson_or_none(*map(np.array, zip(*pairs))) if n >= 3 else None
        if r is None:
            table.append(FeatureSignificance(name, n, None, None, None, False))
            continue
        test = t_significance(r, n, alpha)
        table.append(FeatureSignificance(name, n, r, test.t, test.p_value, test.significant))
    return table


@dataclass(frozen=True)
class CorrelationMatrix:
    names: tuple[str, ...]
    r: np.ndarray  # NaN marks an undefined cell
    n: np.ndarray


def feature_correlation_matrix(vectors: Sequence[FeatureVector], names: Sequence[str] = FEATURE_NAMES) -> CorrelationMatrix:
    """Pairwise Pearson r with pairwise deletion of absent values.

    The diagonal is 1. An off-diagonal cell is NaN when fewer than 3 joint
    rows exist or either feature is constant over them.
    """
    if len(vectors) < 3:
        raise InsufficientDataError("need at least 3 vectors")
    names = tuple(names)
    k = len(names)
    cols = np.array(
        [[np.nan if v.features.get(n) is None else float(v.features[n]) for n in names] for v in vectors]
    )
    r = np.full((k, k), np.nan)
    counts = np.zeros((k, k), dtype=int)
    for i in range(k):
        for j in range(i, k):
            joint = ~np.isnan(cols[:, i]) & ~np.isnan(cols[:, j])
            counts[i, j] = counts[j, i] = int(joint.sum())
            if i == j:
                r[i, i] = 1.0
                continue
            if counts[i, j] >= 3:
                value = pearson_or_none(cols[joint, i], cols[joint, j])
                if value is not None:
                    r[i, j] = r[j, i] = value
    return CorrelationMatrix(names, r, counts)
