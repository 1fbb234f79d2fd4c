"""ASR adapter parsing and word-level Levenshtein alignment."""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import AsrSchemaError, EmptyReferenceError, ValidationError

MATCH = "match"
SUBSTITUTE = "substitute"
INSERT = "insert"
DELETE = "delete"

_PUNCT = string.punctuation + "“”‘’…–—"


def normalize_token(token: str) -> str:
    return token.strip().strip(_PUNCT).lower()


def tokenize(text: str) -> list[str]:
    """Whitespace split + normalization; tokens that are pure punctuation vanish."""
    return [tok for tok in (normalize_token(t) for t in text.split()) if tok]


@dataclass(frozen=True)
class WordTiming:
    token: str
    start_s: float
    end_s: float
    confidence: float


@dataclass(frozen=True)
class AsrResult:
    words: tuple[WordTiming, ...]
    utterance_confidence: float
    source_id: str

    @property
    def tokens(self) -> list[str]:
        return [w.token for w in self.words]

    def without(self, lexicon: Iterable[str]) -> "AsrResult":
        """Copy with every token in ``lexicon`` removed (e.g. fillers)."""
        drop = set(lexicon)
        return AsrResult(tuple(w for w in self.words if w.token not in drop), self.utterance_confidence, self.source_id)


@dataclass(frozen=True)
class AlignmentOp:
    kind: str
    ref_index: Optional[int] = None
    hyp_index: Optional[int] = None


def _require(obj: dict, key: str, kinds, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise AsrSchemaError(f"{where}{key}")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, kinds):
        raise AsrSchemaError(f"{where}{key}", f"field {where}{key} has wrong type")
    return value


def _unit_interval(value: float, name: str) -> float:
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"{name} must lie in [0, 1], got {value}")
    return float(value)


def parse_asr_json(text: str | bytes) -> AsrResult:
    """Parse an adapter document into an :class:`AsrResult`.

    Expected shape::

        {"source_id": str, "utterance_confidence": number,
         "words": [{"token": str, "start_s": number, "end_s": number,
                    "confidence": number}, ...]}
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"ASR document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise AsrSchemaError("<root>", "ASR document must be a JSON object")

    source_id = _require(doc, "source_id", str, "")
    utt_conf = _unit_interval(_require(doc, "utterance_confidence", (int, float), ""), "utterance_confidence")
    raw_words = _require(doc, "words", list, "")

    words = []
    for i, raw in enumerate(raw_words):
        where = f"words[{i}]."
        token = normalize_token(_require(raw, "token", str, where))
        start = float(_require(raw, "start_s", (int, float), where))
        end = float(_require(raw, "end_s", (int, float), where))
        conf = _unit_interval(_require(raw, "confidence", (int, float), where), f"{where}confidence")
        if not token:
            raise ValidationError(f"{where}token is empty after normalization")
        if start < 0 or end < 0:
            raise ValidationError(f"{where} negative time")
        if start >= end:
            raise ValidationError(f"{where} start_s must be < end_s")
        words.append(WordTiming(token, start, end, conf))

    words.sort(key=lambda w: (w.start_s, w.end_s))
    for prev, nxt in zip(words, words[1:]):
        if prev.end_s > nxt.start_s:
            raise ValidationError(f"overlapping words {prev.token!r} and {nxt.token!r}")
    return AsrResult(tuple(words), utt_conf, source_id)


def asr_to_dict(asr: AsrResult) -> dict:
    return {
        "source_id": asr.source_id,
        "utterance_confidence": asr.utterance_confidence,
        "words": [
            {"token": w.token, "start_s": w.start_s, "end_s": w.end_s, "confidence": w.confidence}
            for w in asr.words
        ],
    }


def align_words(ref: Sequence[str], hyp: Sequence[str]) -> tuple[int, list[AlignmentOp]]:
    """Unit-cost edit distance between two token sequences plus one optimal edit script.

    Backtrace preference on ties: match, substitute, delete, insert.
    """
    n, m = len(ref), len(hyp)
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = i
    for j in range(1, m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        row, prev = dist[i], dist[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ref[i - 1] == hyp[j - 1] else 1
            row[j] = min(prev[j - 1] + cost, prev[j] + 1, row[j - 1] + 1)

    ops = []
    i, j = n, m
    while i > 0 or j > 0:
        here = dist[i][j]
        if i > 0 and j > 0 and ref[i - 1] == hyp[j - 1] and dist[i - 1][j - 1] == here:
            ops.append(AlignmentOp(MATCH, i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and dist[i - 1][j - 1] + 1 == here:
            ops.append(AlignmentOp(SUBSTITUTE, i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i > 0 and dist[i - 1][j] + 1 == here:
            ops.append(AlignmentOp(DELETE, i - 1, None))
            i -= 1
        else:
            ops.append(AlignmentOp(INSERT, None, j - 1))
            j -= 1
    ops.reverse()
    return dist[n][m], ops


def apply_ops(ref: Sequence[str], hyp: Sequence[str], ops: Sequence[AlignmentOp]) -> list[str]:
    """Rebuild the hypothesis from ``ref`` by replaying ``ops``.

    Substitutions and insertions take their word from ``hyp``; the result
    equals ``hyp`` whenever ``ops`` came from :func:`align_words`.
    """
    out = []
    for op in ops:
        if op.kind == MATCH:
            out.append(ref[op.ref_index])
        elif op.kind in (SUBSTITUTE, INSERT):
            out.append(hyp[op.hyp_index])
    return out


def accuracy_score(ref: Sequence[str], hyp: Sequence[str]) -> float:
    """1 - distance / max(len(ref), len(hyp)), clamped to [0, 1]."""
    if not ref:
        raise EmptyReferenceError("reference word sequence is empty")
    distance, _ = align_words(ref, hyp)
    return min(1.0, max(0.0, 1.0 - distance / max(len(ref), len(hyp))))
