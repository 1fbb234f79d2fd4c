"""WAV decoding, framing and energy-based speech/silence segmentation."""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, UnsupportedFormatError, WavFormatError

EXPECTED_RATE_HZ = 16000
PCM_FORMAT_TAG = 1

DEFAULT_FRAME_S = 0.03
DEFAULT_HOP_S = 0.01
DEFAULT_RMS_THRESHOLD = 0.02


@dataclass(frozen=True, eq=False)
class AudioClip:
    """Mono signal normalized to [-1, 1]."""

    samples: np.ndarray
    sample_rate_hz: int
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ConfigurationError("sample_rate_hz must be positive")
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ConfigurationError("AudioClip expects a 1-D sample array")
        if samples.size and (samples.min() < -1.0 or samples.max() > 1.0):
            raise ConfigurationError("samples must lie in [-1.0, 1.0]")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz

    @property
    def rate_warning(self) -> bool:
        return self.sample_rate_hz != EXPECTED_RATE_HZ


@dataclass(frozen=True)
class SpeechRegion:
    start_s: float
    end_s: float
    mean_rms: float


def _chunks(data: bytes):
    pos = 12
    while pos + 8 <= len(data):
        chunk_id, size = struct.unpack_from("<4sI", data, pos)
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise WavFormatError(f"truncated {chunk_id!r} chunk")
        yield chunk_id, body
        pos += 8 + size + (size & 1)


def decode_wav(data: bytes) -> AudioClip:
    """Decode a 16-bit mono PCM RIFF/WAVE byte string.

    Samples are divided by 32768. Rates other than 16 kHz are accepted and
    reported through ``AudioClip.warnings``.
    """
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavFormatError("not a RIFF/WAVE container")

    fmt = None
    pcm = None
    for chunk_id, body in _chunks(data):
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise WavFormatError("fmt chunk too short")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            pcm = body
            break
    if fmt is None:
        raise WavFormatError("missing fmt chunk")
    if pcm is None:
        raise WavFormatError("missing data chunk")

    format_tag, channels, rate, _byte_rate, block_align, bits = fmt
    if format_tag != PCM_FORMAT_TAG:
        raise UnsupportedFormatError(f"format tag {format_tag} is not PCM")
    if channels != 1:
        raise UnsupportedFormatError(f"{channels} channels; only mono is supported")
    if bits != 16:
        raise UnsupportedFormatError(f"{bits}-bit samples; only 16-bit is supported")
    if rate == 0 or block_align != 2:
        raise WavFormatError("inconsistent fmt chunk")
    if len(pcm) % 2:
        pcm = pcm[:-1]

    samples = np.frombuffer(pcm, dtype="<i2").astype(np.float64) / 32768.0
    warnings = () if rate == EXPECTED_RATE_HZ else (f"sample rate {rate} Hz differs from {EXPECTED_RATE_HZ} Hz",)
    return AudioClip(samples, rate, warnings)


def encode_wav(clip: AudioClip) -> bytes:
    """Inverse of :func:`decode_wav` (exact for samples that are multiples of 1/32768)."""
    ints = np.clip(np.round(clip.samples * 32768.0), -32768, 32767).astype("<i2")
    pcm = ints.tobytes()
    rate = clip.sample_rate_hz
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(pcm), b"WAVE",
        b"fmt ", 16, PCM_FORMAT_TAG, 1, rate, rate * 2, 2, 16,
        b"data", len(pcm),
    )
    return header + pcm


def read_wav(path) -> AudioClip:
    with open(path, "rb") as fh:
        return decode_wav(fh.read())


def frame_signal(samples: np.ndarray, frame_len: int, hop: int) -> np.ndarray:
    """Return a (n_frames, frame_len) strided view; frames never run past the end."""
    samples = np.asarray(samples)
    if len(samples) < frame_len:
        return np.empty((0, frame_len), dtype=samples.dtype)
    n_frames = 1 + (len(samples) - frame_len) // hop
    return np.lib.stride_tricks.sliding_window_view(samples, frame_len)[::hop][:n_frames]


def frame_rms(clip: AudioClip, frame_s: float = DEFAULT_FRAME_S, hop_s: float = DEFAULT_HOP_S) -> np.ndarray:
    frame_len = max(1, int(round(frame_s * clip.sample_rate_hz)))
    hop = max(1, int(round(hop_s * clip.sample_rate_hz)))
    frames = frame_signal(clip.samples, frame_len, hop)
    return np.sqrt(np.mean(frames**2, axis=1)) if len(frames) else np.empty(0)


def detect_speech_regions(
    clip: AudioClip,
    frame_s: float = DEFAULT_FRAME_S,
    hop_s: float = DEFAULT_HOP_S,
    rms_threshold: float = DEFAULT_RMS_THRESHOLD,
) -> list[SpeechRegion]:
    """Merge runs of frames whose RMS reaches ``rms_threshold`` into regions.

    A region spans from the first frame's start to the last frame's end, or
    to the clip end when it reaches the final frame. Runs whose spans touch
    or overlap because the frame is longer than the hop are merged, so the
    result is sorted and disjoint.
    """
    if not 0 < hop_s <= frame_s:
        raise ConfigurationError("require 0 < hop_s <= frame_s")
    if not 0 < rms_threshold < 1:
        raise ConfigurationError("rms_threshold must lie in (0, 1)")

    rate = clip.sample_rate_hz
    frame_len = max(1, int(round(frame_s * rate)))
    hop = max(1, int(round(hop_s * rate)))
    rms = frame_rms(clip, frame_s, hop_s)
    if rms.size == 0:
        return []

    speech = rms >= rms_threshold
    # run boundaries from the padded diff of the boolean mask
    edges = np.flatnonzero(np.diff(np.concatenate(([0], speech.astype(np.int8), [0]))))
    runs = list(zip(edges[::2], edges[1::2] - 1))

    merged: list[list[int]] = []
    for first, last in runs:
        if merged and first * hop <= merged[-1][1] * hop + frame_len:
            merged[-1][1] = last
        else:
            merged.append([first, last])

    duration = clip.duration_s
    final = len(rms) - 1
    regions = []
    for first, last in merged:
        start = first * hop / rate
        # samples past the last full frame belong to its region
        end = duration if last == final else min((last * hop + frame_len) / rate, duration)
        regions.append(SpeechRegion(float(start), float(end), float(np.mean(rms[first : last + 1]))))
    return regions


def silence_regions(regions: list[SpeechRegion], duration_s: float) -> list[tuple[float, float]]:
    """Complement of ``regions`` within [0, duration_s]."""
    gaps = []
    cursor = 0.0
    for region in regions:
        if region.start_s > cursor:
            gaps.append((cursor, region.start_s))
        cursor = region.end_s
    if cursor < duration_s:
        gaps.append((cursor, duration_s))
    return gaps
