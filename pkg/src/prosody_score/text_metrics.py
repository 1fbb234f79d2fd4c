"""Difficulty metrics for sets of read-aloud sentences.

Three numbers per sentence: words with more than four syllables, lexical
density (content words over all words) and Flesch-Kincaid grade level.
"""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Callable, Sequence

from .errors import EmptySetError, TokenError, ValidationError

POLYSYLLABIC_MIN = 5  # "more than 4 syllables"

_VOWEL_GROUP = re.compile(r"[aeiouy]+")
_WORD = re.compile(r"[A-Za-z]+(?:'[A-Za-z]+)*")
_SENTENCE_END = re.compile(r"(?<=[.!?])\s+")

_FK_WORDS = Fraction("0.39")
_FK_SYLLABLES = Fraction("11.8")
_FK_OFFSET = Fraction("15.59")


def count_syllables(word: str) -> int:
    """Vowel-group heuristic.

    Count maximal runs of a/e/i/o/u/y; drop one for a final silent 'e'
    except in consonant + "le" endings ("table"); never return less than 1.
    """
    if not word or not word.isalpha() or not word.isascii():
        raise TokenError(f"not an alphabetic token: {word!r}")
    w = word.lower()
    count = len(_VOWEL_GROUP.findall(w))
    if w.endswith("e"):
        consonant_le = w.endswith("le") and len(w) >= 3 and w[-3] not in "aeiouy"
        if not consonant_le:
            count -= 1
    return max(count, 1)


def flesch_kincaid_grade(word_count: int, sentence_count: int, syllable_count: int) -> float:
    """0.39 * words/sentences + 11.8 * syllables/words - 15.59.

    Evaluated in rational arithmetic so decimal inputs give the nearest float
    (``flesch_kincaid_grade(10, 1, 13) == 3.65``).
    """
    if word_count <= 0 or sentence_count <= 0:
        raise ZeroDivisionError("word_count and sentence_count must be positive")
    grade = (
        _FK_WORDS * Fraction(word_count, sentence_count)
        + _FK_SYLLABLES * Fraction(syllable_count, word_count)
        - _FK_OFFSET
    )
    return float(grade)


@lru_cache(maxsize=None)
def function_words() -> frozenset[str]:
    text = resources.files("prosody_score").joinpath("data/function_words.txt").read_text("utf-8")
    return frozenset(
        line.strip().lower() for line in text.splitlines() if line.strip() and not line.startswith("#")
    )


def is_content_word(token: str) -> bool:
    return token.lower() not in function_words()


def lexical_density(tokens: Sequence[str], content_word_predicate: Callable[[str], bool] = is_content_word) -> float:
    if not tokens:
        raise ValidationError("lexical density of an empty token list is undefined")
    return sum(1 for t in tokens if content_word_predicate(t)) / len(tokens)


def words_of(text: str) -> list[str]:
    """Alphabetic words (apostrophe contractions kept whole, lowercased)."""
    return [w.lower() for w in _WORD.findall(text)]


def split_sentences(text: str) -> list[str]:
    return [s for s in _SENTENCE_END.split(text.strip()) if s]


@dataclass(frozen=True)
class SentenceDifficulty:
    sentence: str
    word_count: int
    syllable_count: int
    polysyllabic_words: int
    fk_grade: float
    lexical_density: float


METRICS = ("word_count", "syllable_count", "polysyllabic_words", "fk_grade", "lexical_density")


@dataclass
class DifficultyReport:
    sentences: list[SentenceDifficulty]
    aggregates: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"sentences": [asdict(s) for s in self.sentences], "aggregates": dict(self.aggregates)}


def sentence_difficulty(sentence: str) -> SentenceDifficulty:
    words = words_of(sentence)
    if not words:
        raise ValidationError(f"sentence has no words: {sentence!r}")
    syllables = [count_syllables(w.replace("'", "")) for w in words]
    n_sentences = max(1, len(split_sentences(sentence)))
    return SentenceDifficulty(
        sentence=sentence,
        word_count=len(words),
        syllable_count=sum(syllables),
        polysyllabic_words=sum(1 for s in syllables if s >= POLYSYLLABIC_MIN),
        fk_grade=flesch_kincaid_grade(len(words), n_sentences, sum(syllables)),
        lexical_density=lexical_density(words),
    )


def difficulty_report(sentences: Sequence[str]) -> DifficultyReport:
    """Per-sentence metrics plus unweighted set means."""
    if not sentences:
        raise EmptySetError("no sentences")
    rows = []
    for i, sentence in enumerate(sentences):
        if not words_of(sentence):
            raise ValidationError(f"sentence {i} is empty")
        rows.append(sentence_difficulty(sentence))
    aggregates = {m: sum(getattr(r, m) for r in rows) / len(rows) for m in METRICS}
    return DifficultyReport(rows, aggregates)


DEFAULT_TOLERANCES = {
    "word_count": 2.0,
    "syllable_count": 3.0,
    "polysyllabic_words": 0.5,
    "fk_grade": 1.0,
    "lexical_density": 0.05,
}


def compare_reports(a: DifficultyReport, b: DifficultyReport, tolerances: dict[str, float] | None = None) -> dict:
    """Absolute aggregate differences and a uniform/non-uniform verdict."""
    tol = {**DEFAULT_TOLERANCES, **(tolerances or {})}
    deltas = {m: abs(a.aggregates[m] - b.aggregates[m]) for m in METRICS}
    exceeded = sorted(m for m in METRICS if deltas[m] > tol[m])
    return {
        "deltas": deltas,
        "tolerances": {m: tol[m] for m in METRICS},
        "exceeded": exceeded,
        "verdict": "non-uniform" if exceeded else "uniform",
    }


def read_sentence_file(path) -> list[str]:
    """One sentence per line. Trailing blank lines are ignored; interior blanks are errors."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise EmptySetError(f"{path}: no sentences")
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            raise ValidationError(f"{path}: line {number} is blank")
    return [line.strip() for line in lines]


def format_table(report: DifficultyReport) -> str:
    header = ("#", "words", "syll", "poly", "fk_grade", "lex_dens", "sentence")
    rows = [
        (str(i), str(s.word_count), str(s.syllable_count), str(s.polysyllabic_words),
         f"{s.fk_grade:.2f}", f"{s.lexical_density:.3f}", s.sentence)
        for i, s in enumerate(report.sentences, start=1)
    ]
    agg = report.aggregates
    rows.append(("mean", f"{agg['word_count']:.2f}", f"{agg['syllable_count']:.2f}",
                 f"{agg['polysyllabic_words']:.2f}", f"{agg['fk_grade']:.2f}",
                 f"{agg['lexical_density']:.3f}", ""))
    widths = [max(len(r[c]) for r in [header, *rows]) for c in range(len(header) - 1)]
    lines = []
    for r in [header, *rows]:
        cells = [r[c].rjust(widths[c]) for c in range(len(widths))]
        lines.append("  ".join(cells + [r[-1]]).rstrip())
    return "\n".join(lines)
