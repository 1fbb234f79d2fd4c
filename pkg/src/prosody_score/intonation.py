"""Per-word pitch vectors, trained intonation profiles and SimIntonation.

A profile keeps a running (sum, count) of mean F0 per reference word, so
training is streaming and independent of speaker order. SimIntonation is the
Pearson correlation between a test reading's per-word pitch and the profile
means, taken over words present on both sides.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ProfileMismatchError, ValidationError
from .pitch_tracker import PitchTrack
from .scoring.stats import pearson_or_none
from .transcript_align import MATCH, AlignmentOp, AsrResult

DEFAULT_MIN_POINTS = 3
SEMITONE_REF_HZ = 100.0
SCALES = ("hz", "semitone")


@dataclass(frozen=True)
class WordPitchVector:
    sentence_id: str
    values: tuple[Optional[float], ...]

    @property
    def n_words(self) -> int:
        return len(self.values)

    def present(self) -> list[tuple[int, float]]:
        return [(i, v) for i, v in enumerate(self.values) if v is not None]


@dataclass(frozen=True)
class IntonationProfile:
    sentence_id: str
    sums: tuple[float, ...]
    counts: tuple[int, ...]
    trained_by: int = 0

    @classmethod
    def fresh(cls, sentence_id: str, n_words: int) -> "IntonationProfile":
        return cls(sentence_id, (0.0,) * n_words, (0,) * n_words, 0)

    @property
    def n_words(self) -> int:
        return len(self.sums)

    def means(self) -> tuple[Optional[float], ...]:
        return tuple(s / c if c else None for s, c in zip(self.sums, self.counts))

    def merge(self, other: "IntonationProfile") -> "IntonationProfile":
        _check_identity(self.sentence_id, self.n_words, other.sentence_id, other.n_words)
        return IntonationProfile(
            self.sentence_id,
            tuple(a + b for a, b in zip(self.sums, other.sums)),
            tuple(a + b for a, b in zip(self.counts, other.counts)),
            self.trained_by + other.trained_by,
        )

    def to_dict(self) -> dict:
        return {
            "sentence_id": self.sentence_id,
            "n_words": self.n_words,
            "per_word": [{"sum_f0_hz": s, "count": c} for s, c in zip(self.sums, self.counts)],
            "trained_by": self.trained_by,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "IntonationProfile":
        try:
            per_word = doc["per_word"]
            profile = cls(
                str(doc["sentence_id"]),
                tuple(float(w["sum_f0_hz"]) for w in per_word),
                tuple(int(w["count"]) for w in per_word),
                int(doc["trained_by"]),
            )
            n_words = int(doc["n_words"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed profile document: {exc}") from exc
        if n_words != profile.n_words:
            raise ValidationError(f"profile {profile.sentence_id!r}: n_words disagrees with per_word")
        if any(c > profile.trained_by or c < 0 for c in profile.counts):
            raise ValidationError(f"profile {profile.sentence_id!r}: word count exceeds trained_by")
        return profile


def _check_identity(sid_a: str, n_a: int, sid_b: str, n_b: int) -> None:
    if sid_a != sid_b:
        raise ProfileMismatchError(f"sentence id {sid_b!r} does not match profile {sid_a!r}")
    if n_a != n_b:
        raise ProfileMismatchError(f"sentence {sid_a!r}: {n_b} words vs profile's {n_a}")


def word_pitch_vector(
    track: PitchTrack,
    asr: AsrResult,
    alignment: Sequence[AlignmentOp],
    sentence_id: str,
) -> WordPitchVector:
    """Mean voiced F0 per reference word.

    ``alignment`` must index into ``asr.words``. Only matched words get a
    value; a matched word without voiced frames is absent, as are substituted
    and deleted reference words.
    """
    n_words = sum(1 for op in alignment if op.ref_index is not None)
    values: list[Optional[float]] = [None] * n_words
    for op in alignment:
        if op.kind != MATCH:
            continue
        word = asr.words[op.hyp_index]
        f0 = track.voiced_f0_between(word.start_s, word.end_s)
        if f0.size:
            values[op.ref_index] = float(np.mean(f0))
    return WordPitchVector(sentence_id, tuple(values))


def train_profile(profile: IntonationProfile | None, vector: WordPitchVector) -> IntonationProfile:
    """Fold one speaker's vector into ``profile`` (``None`` starts a fresh one)."""
    if profile is None:
        profile = IntonationProfile.fresh(vector.sentence_id, vector.n_words)
    _check_identity(profile.sentence_id, profile.n_words, vector.sentence_id, vector.n_words)
    sums = list(profile.sums)
    counts = list(profile.counts)
    for i, value in vector.present():
        sums[i] += value
        counts[i] += 1
    return IntonationProfile(profile.sentence_id, tuple(sums), tuple(counts), profile.trained_by + 1)


def _to_scale(values: np.ndarray, scale: str) -> np.ndarray:
    if scale == "hz":
        return values
    if scale == "semitone":
        return 12.0 * np.log2(values / SEMITONE_REF_HZ)
    raise ValueError(f"unknown pitch scale {scale!r}; expected one of {SCALES}")


def sim_intonation(
    profile: IntonationProfile,
    test: WordPitchVector,
    min_points: int = DEFAULT_MIN_POINTS,
    scale: str = "hz",
) -> Optional[float]:
    """Pearson r between profile means and test values over jointly present words.

    Returns None (feature absent) with fewer than ``min_points`` pairs or when
    either side is constant.
    """
    _check_identity(profile.sentence_id, profile.n_words, test.sentence_id, test.n_words)
    pairs = [(m, v) for m, v in zip(profile.means(), test.values) if m is not None and v is not None]
    if len(pairs) < max(min_points, 2):
        return None
    ref = _to_scale(np.array([p[0] for p in pairs]), scale)
    hyp = _to_scale(np.array([p[1] for p in pairs]), scale)
    return pearson_or_none(ref, hyp)


def mean_present(values: Iterable[Optional[float]]) -> Optional[float]:
    """Average of the non-None values (per-sentence SimIntonation → test level)."""
    present = [v for v in values if v is not None and not math.isnan(v)]
    return sum(present) / len(present) if present else None


class ProfileStore:
    """Profiles keyed by sentence id, persisted as one JSON file."""

    def __init__(self, profiles: dict[str, IntonationProfile] | None = None):
        self.profiles: dict[str, IntonationProfile] = dict(profiles or {})

    def get(self, sentence_id: str) -> Optional[IntonationProfile]:
        return self.profiles.get(sentence_id)

    def add(self, profile: IntonationProfile) -> None:
        """Merge additively with any stored profile for the same sentence."""
        current = self.profiles.get(profile.sentence_id)
        self.profiles[profile.sentence_id] = profile if current is None else current.merge(profile)

    def to_dict(self) -> dict:
        return {"profiles": [self.profiles[k].to_dict() for k in sorted(self.profiles)]}

    @classmethod
    def from_dict(cls, doc: dict) -> "ProfileStore":
        store = cls()
        if not isinstance(doc, dict) or not isinstance(doc.get("profiles"), list):
            raise ValidationError("profile store must be an object with a 'profiles' list")
        for item in doc["profiles"]:
            store.add(IntonationProfile.from_dict(item))
        return store

    @classmethod
    def load(cls, path) -> "ProfileStore":
        with open(path, encoding="utf-8") as fh:
            try:
                return cls.from_dict(json.load(fh))
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: not valid JSON: {exc}") from exc
