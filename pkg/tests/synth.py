"""Synthetic signals, ASR documents and readings for the test suite."""

from __future__ import annotations

import json

import numpy as np
from scipy import signal

from prosody_score.audio_io import AudioClip, encode_wav

RATE = 16000


def sine(freq_hz, duration_s, amplitude=0.5, rate=RATE):
    t = np.arange(int(round(duration_s * rate))) / rate
    return amplitude * np.sin(2 * np.pi * freq_hz * t)


def sawtooth(freq_hz, duration_s, amplitude=0.5, rate=RATE):
    t = np.arange(int(round(duration_s * rate))) / rate
    return amplitude * signal.sawtooth(2 * np.pi * freq_hz * t)


def glide(f_start, f_end, duration_s, amplitude=0.5, rate=RATE):
    n = int(round(duration_s * rate))
    inst = f_start + (f_end - f_start) * np.arange(n) / n
    return amplitude * np.sin(2 * np.pi * np.cumsum(inst) / rate), inst


def clip_of(samples, rate=RATE) -> AudioClip:
    return AudioClip(np.asarray(samples, dtype=np.float64), rate)


def asr_doc(words, source_id="cand-1", utterance_confidence=0.9):
    """``words`` is a list of (token, start, end) or (token, start, end, conf)."""
    out = []
    for w in words:
        token, start, end = w[:3]
        conf = w[3] if len(w) > 3 else 0.9
        out.append({"token": token, "start_s": start, "end_s": end, "confidence": conf})
    return {"source_id": source_id, "utterance_confidence": utterance_confidence, "words": out}


def asr_json(words, **kw) -> str:
    return json.dumps(asr_doc(words, **kw))


def reading(tokens, pitches_hz, word_s=0.3, gap_s=0.1, lead_s=0.2, tail_s=0.2, amplitude=0.3, rate=RATE):
    """Each token a sine tone at its pitch (None = silent word), separated by silence.

    Returns (wav bytes, word timings as (token, start, end)).
    """
    pieces = [np.zeros(int(round(lead_s * rate)))]
    timings = []
    cursor = lead_s
    for i, (token, f0) in enumerate(zip(tokens, pitches_hz)):
        n = int(round(word_s * rate))
        pieces.append(np.zeros(n) if f0 is None else sine(f0, word_s, amplitude, rate)[:n])
        timings.append((token, round(cursor, 6), round(cursor + word_s, 6)))
        cursor += word_s
        if i < len(tokens) - 1:
            pieces.append(np.zeros(int(round(gap_s * rate))))
            cursor += gap_s
    pieces.append(np.zeros(int(round(tail_s * rate))))
    samples = np.concatenate(pieces)
    return encode_wav(clip_of(samples, rate)), timings
