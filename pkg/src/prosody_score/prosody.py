"""Inter-word pauses, the four-way pause taxonomy, and fluency rates."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Callable, Iterable, Optional

from .errors import DegenerateTimingError, EmptyUtteranceError
from .text_metrics import count_syllables
from .transcript_align import AsrResult, normalize_token

SHORT_FILLED = "short_filled"
LONG_FILLED = "long_filled"
SHORT_UNFILLED = "short_unfilled"
LONG_UNFILLED = "long_unfilled"
PAUSE_KINDS = (SHORT_FILLED, LONG_FILLED, SHORT_UNFILLED, LONG_UNFILLED)

DEFAULT_MIN_PAUSE_S = 0.25
DEFAULT_LONG_PAUSE_S = 1.0

# Timestamps are rounded to this many decimals before comparing against
# thresholds, so 3.0 - 2.0 and 5.3 - 4.3 both count as exactly 1.0 s.
_TIME_DECIMALS = 9


@lru_cache(maxsize=None)
def default_fillers() -> frozenset[str]:
    text = resources.files("prosody_score").joinpath("data/fillers.txt").read_text("utf-8")
    return frozenset(load_filler_lexicon_text(text))


def load_filler_lexicon_text(text: str) -> set[str]:
    return {normalize_token(line) for line in text.splitlines() if normalize_token(line)}


def load_filler_lexicon(path) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return frozenset(load_filler_lexicon_text(fh.read()))


@dataclass(frozen=True)
class PauseEvent:
    start_s: float
    end_s: float
    duration_s: float
    kind: str
    filler_token: Optional[str] = None

    @property
    def filled(self) -> bool:
        return self.filler_token is not None


@dataclass(frozen=True)
class FluencyMetrics:
    words_per_minute: float
    articulation_rate: float
    total_pause_s: float
    pause_counts: dict[str, int] = field(hash=False)
    phonation_time_s: float
    speaking_span_s: float
    word_count: int
    syllable_count: int


def classify_pause(duration_s: float, filled: bool, short_long_boundary_s: float = DEFAULT_LONG_PAUSE_S) -> str:
    """Short iff ``duration_s < boundary``; the boundary itself is long."""
    if duration_s < short_long_boundary_s:
        return SHORT_FILLED if filled else SHORT_UNFILLED
    return LONG_FILLED if filled else LONG_UNFILLED


def extract_pauses(
    asr: AsrResult,
    filler_lexicon: Iterable[str] | None = None,
    min_pause_s: float = DEFAULT_MIN_PAUSE_S,
    short_long_boundary_s: float = DEFAULT_LONG_PAUSE_S,
) -> list[PauseEvent]:
    """Pauses between consecutive lexical (non-filler) words.

    The stretch between two lexical words is one candidate pause. If it holds
    filler tokens the whole stretch, filler spans included, is a filled pause
    labelled with the first filler; otherwise it is the silent gap. Leading and
    trailing fillers form a pause bounded by the filler span. Stretches shorter
    than ``min_pause_s`` are ignored.
    """
    if min_pause_s <= 0:
        raise ValueError("min_pause_s must be positive")
    fillers = default_fillers() if filler_lexicon is None else frozenset(filler_lexicon)

    pauses = []
    prev_end: Optional[float] = None
    pending: list = []  # filler words since the previous lexical word

    def close(end: float) -> None:
        start = prev_end if prev_end is not None else pending[0].start_s
        duration = round(end - start, _TIME_DECIMALS)
        if duration <= 0 or duration < min_pause_s:
            return
        token = pending[0].token if pending else None
        kind = classify_pause(duration, token is not None, short_long_boundary_s)
        pauses.append(PauseEvent(start, end, duration, kind, token))

    for word in asr.words:
        if word.token in fillers:
            pending.append(word)
            continue
        if prev_end is not None or pending:
            close(word.start_s)
        prev_end = word.end_s
        pending = []
    if pending:
        close(pending[-1].end_s)
    return pauses


def fluency_metrics(
    asr: AsrResult,
    pauses: list[PauseEvent],
    syllable_counter: Callable[[str], int] = count_syllables,
    filler_lexicon: Iterable[str] | None = None,
) -> FluencyMetrics:
    """Speaking rate and articulation rate.

    The speaking span runs from the first word's start to the last word's
    end. Phonation time is the span minus all pause time, and articulation
    rate divides syllables of lexical words by phonation time.
    """
    fillers = default_fillers() if filler_lexicon is None else frozenset(filler_lexicon)
    lexical = [w for w in asr.words if w.token not in fillers]
    if not lexical:
        raise EmptyUtteranceError("utterance has no non-filler words")

    span = asr.words[-1].end_s - asr.words[0].start_s
    total_pause = sum(p.duration_s for p in pauses)
    phonation = span - total_pause
    if span <= 0 or phonation <= 0:
        raise DegenerateTimingError(f"non-positive phonation time (span {span} s, pauses {total_pause} s)")

    syllables = sum(syllable_counter(_alpha(w.token)) for w in lexical)
    counts = {kind: 0 for kind in PAUSE_KINDS}
    for p in pauses:
        counts[p.kind] += 1
    return FluencyMetrics(
        words_per_minute=60.0 * len(lexical) / span,
        articulation_rate=syllables / phonation,
        total_pause_s=total_pause,
        pause_counts=counts,
        phonation_time_s=phonation,
        speaking_span_s=span,
        word_count=len(lexical),
        syllable_count=syllables,
    )


def _alpha(token: str) -> str:
    # apostrophes and digits are dropped; a digit-only token counts as one syllable
    letters = "".join(ch for ch in token if ch.isascii() and ch.isalpha())
    return letters or "a"
