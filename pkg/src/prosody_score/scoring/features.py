"""Fixed feature schema, per-candidate vectors and the 60:20:20 split."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from ..errors import InsufficientDataError, SchemaMismatchError, ValidationError
from ..prosody import PAUSE_KINDS, FluencyMetrics
from ..transcript_align import AsrResult

SCHEMA_VERSION = "1"
FEATURE_NAMES = (
    "accuracy",
    "words_per_minute",
    "articulation_rate",
    "pause_count_short_filled",
    "pause_count_long_filled",
    "pause_count_short_unfilled",
    "pause_count_long_unfilled",
    "total_pause_s",
    "sim_intonation",
    "asr_confidence",
)

SPLIT_FRACTIONS = (0.6, 0.2, 0.2)
MIN_SPLIT_SIZE = 5


@dataclass(frozen=True)
class FeatureVector:
    candidate_id: str
    features: Mapping[str, Optional[float]] = field(hash=False)
    manual_score: Optional[float] = None
    schema_version: str = SCHEMA_VERSION

    def value(self, name: str) -> Optional[float]:
        return self.features.get(name)

    def missing(self, names: Iterable[str]) -> list[str]:
        return [n for n in names if self.features.get(n) is None]


def assemble_features(
    candidate_id: str,
    accuracy: float,
    fluency: FluencyMetrics,
    sim: Optional[float],
    asr: AsrResult,
) -> FeatureVector:
    values = {
        "accuracy": float(accuracy),
        "words_per_minute": float(fluency.words_per_minute),
        "articulation_rate": float(fluency.articulation_rate),
        **{f"pause_count_{kind}": float(fluency.pause_counts[kind]) for kind in PAUSE_KINDS},
        "total_pause_s": float(fluency.total_pause_s),
        "sim_intonation": None if sim is None else float(sim),
        "asr_confidence": float(asr.utterance_confidence),
    }
    return FeatureVector(candidate_id, {name: values[name] for name in FEATURE_NAMES})


def check_schema(vector: FeatureVector, names: Sequence[str] = FEATURE_NAMES) -> None:
    if vector.schema_version != SCHEMA_VERSION:
        raise SchemaMismatchError(f"feature schema {vector.schema_version!r}, expected {SCHEMA_VERSION!r}")
    unknown = [n for n in names if n not in vector.features]
    if unknown:
        raise SchemaMismatchError(f"vector {vector.candidate_id!r} lacks features {unknown}")


@dataclass(frozen=True)
class DatasetSplit:
    train: tuple[str, ...]
    validation: tuple[str, ...]
    test: tuple[str, ...]
    seed: int


def split_sizes(n: int) -> tuple[int, int, int]:
    """Validation and test get round(0.2 n) each; train takes the remainder."""
    held_out = round(n * SPLIT_FRACTIONS[1])
    return n - 2 * held_out, held_out, held_out


def split_dataset(ids: Iterable[str], seed: int) -> DatasetSplit:
    ordered = sorted(set(ids))
    if len(ordered) < MIN_SPLIT_SIZE:
        raise InsufficientDataError(f"need at least {MIN_SPLIT_SIZE} candidates to split, got {len(ordered)}")
    n_train, n_val, _ = split_sizes(len(ordered))
    perm = np.random.default_rng(seed).permutation(len(ordered))
    shuffled = [ordered[i] for i in perm]
    return DatasetSplit(
        tuple(shuffled[:n_train]),
        tuple(shuffled[n_train : n_train + n_val]),
        tuple(shuffled[n_train + n_val :]),
        seed,
    )


def _cell(value: Optional[float]) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return format(value, ".9g")


def vectors_to_csv(vectors: Sequence[FeatureVector], names: Sequence[str] = FEATURE_NAMES) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["candidate_id", *names, "manual_score"])
    for v in vectors:
        writer.writerow([v.candidate_id, *(_cell(v.value(n)) for n in names), _cell(v.manual_score)])
    return buf.getvalue()


def vectors_from_csv(text: str) -> list[FeatureVector]:
    """Inverse of :func:`vectors_to_csv`; empty cells are absent values."""
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    if "candidate_id" not in header:
        raise SchemaMismatchError("feature CSV lacks a candidate_id column")
    names = [h for h in header if h not in ("candidate_id", "manual_score")]
    vectors = []
    for line_no, row in enumerate(reader, start=2):
        try:
            features = {n: float(row[n]) if row[n] not in ("", None) else None for n in names}
            score = row.get("manual_score")
            score = float(score) if score not in ("", None) else None
        except ValueError as exc:
            raise ValidationError(f"feature CSV line {line_no}: {exc}") from exc
        vectors.append(FeatureVector(row["candidate_id"], features, score))
    return vectors
