import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prosody_score.audio_io import (
    AudioClip,
    decode_wav,
    detect_speech_regions,
    encode_wav,
    frame_rms,
    silence_regions,
)
from prosody_score.errors import ConfigurationError, UnsupportedFormatError, WavFormatError

from synth import RATE, clip_of, sine


def _wav(ints, rate=16000, channels=1, bits=16, tag=1):
    pcm = np.asarray(ints, dtype="<i2").tobytes()
    block = channels * bits // 8
    return struct.pack(
        "<4sI4s4sIHHIIHH4sI", b"RIFF", 36 + len(pcm), b"WAVE", b"fmt ", 16, tag, channels,
        rate, rate * block, block, bits, b"data", len(pcm),
    ) + pcm


def test_decode_zero_second():
    clip = decode_wav(_wav(np.zeros(16000)))
    assert clip.sample_rate_hz == 16000
    assert clip.duration_s == 1.0
    assert not clip.samples.any()
    assert clip.warnings == ()


def test_decode_normalization():
    clip = decode_wav(_wav([-32768, 16384, 0, 32767]))
    assert clip.samples[0] == -1.0
    assert clip.samples[1] == 0.5
    assert clip.samples[3] == 32767 / 32768


def test_decode_8khz_warns():
    clip = decode_wav(_wav(np.zeros(800), rate=8000))
    assert clip.sample_rate_hz == 8000
    assert clip.rate_warning
    assert clip.warnings


@pytest.mark.parametrize(
    "data",
    [b"", b"RIFX" + b"\0" * 40, _wav([0, 0])[:20], _wav([0])[:12] + b"data" + struct.pack("<I", 2) + b"\0\0"],
)
def test_malformed_header(data):
    with pytest.raises(WavFormatError):
        decode_wav(data)


def test_unsupported_formats():
    with pytest.raises(UnsupportedFormatError):
        decode_wav(_wav([0, 0], channels=2))
    with pytest.raises(UnsupportedFormatError):
        decode_wav(_wav([0, 0], bits=8))
    with pytest.raises(UnsupportedFormatError):
        decode_wav(_wav([0, 0], tag=3))


def test_skips_unknown_chunks():
    base = _wav([1, 2, 3])
    extra = b"LIST" + struct.pack("<I", 3) + b"abc\0"
    data = base[:12] + extra + base[12:]
    np.testing.assert_array_equal(decode_wav(data).samples, np.array([1, 2, 3]) / 32768)


@settings(max_examples=50)
@given(st.lists(st.integers(-32768, 32767), max_size=400))
def test_pcm_roundtrip_lossless(ints):
    data = _wav(ints)
    clip = decode_wav(data)
    assert encode_wav(clip) == data


def test_clip_invariants():
    with pytest.raises(ConfigurationError):
        AudioClip(np.array([1.5]), 16000)
    with pytest.raises(ConfigurationError):
        AudioClip(np.zeros(3), 0)
    clip = clip_of(np.zeros(12345))
    assert clip.duration_s == 12345 / 16000


def test_all_zero_has_no_regions():
    assert detect_speech_regions(clip_of(np.zeros(RATE)), 0.03, 0.01, 0.05) == []
    assert detect_speech_regions(clip_of(np.zeros(RATE)), 0.03, 0.01, 0.9) == []


def test_clip_shorter_than_frame():
    assert detect_speech_regions(clip_of(np.full(100, 0.5)), 0.03, 0.01, 0.02) == []


def _oracle_region_end(samples, frame_len, hop, threshold):
    """Per-frame RMS in plain Python; returns end time of the last speech frame."""
    last = None
    n_frames = 1 + (len(samples) - frame_len) // hop
    for i in range(n_frames):
        frame = samples[i * hop : i * hop + frame_len]
        rms = (sum(float(x) * float(x) for x in frame) / frame_len) ** 0.5
        if rms >= threshold:
            last = i
    return (last * hop + frame_len) / RATE


def test_sine_then_silence():
    samples = np.concatenate([sine(220, 1.0, 0.5), np.zeros(RATE)])
    regions = detect_speech_regions(clip_of(samples), 0.03, 0.01, 0.05)
    assert len(regions) == 1
    region = regions[0]
    assert region.start_s == 0.0
    expected_end = _oracle_region_end(samples, 480, 160, 0.05)
    assert region.end_s == pytest.approx(expected_end)
    assert abs(region.end_s - 1.0) <= 0.03
    assert 0 < region.mean_rms <= 1


def test_fully_voiced_clip_is_one_region():
    samples = sine(300, 1.234, 0.5) + 0.3
    samples = np.clip(samples, -1, 1)
    clip = clip_of(samples)
    regions = detect_speech_regions(clip, 0.03, 0.01, 0.02)
    assert len(regions) == 1
    assert regions[0].start_s == 0.0
    assert regions[0].end_s == clip.duration_s


def test_config_errors():
    clip = clip_of(np.zeros(RATE))
    with pytest.raises(ConfigurationError):
        detect_speech_regions(clip, 0.01, 0.03, 0.02)
    with pytest.raises(ConfigurationError):
        detect_speech_regions(clip, 0.03, 0.01, 1.0)


@st.composite
def bursty_clip(draw):
    n_segments = draw(st.integers(1, 6))
    parts = []
    for _ in range(n_segments):
        dur = draw(st.floats(0.01, 0.3))
        amp = draw(st.sampled_from([0.0, 0.01, 0.3, 0.8]))
        parts.append(sine(draw(st.sampled_from([150, 440])), dur, amp))
    return clip_of(np.concatenate(parts))


@settings(max_examples=40, deadline=None)
@given(bursty_clip())
def test_regions_tile_and_polarity(clip):
    regions = detect_speech_regions(clip)
    for a, b in zip(regions, regions[1:]):
        assert a.end_s < b.start_s
    for r in regions:
        assert 0 <= r.start_s < r.end_s <= clip.duration_s
    gaps = silence_regions(regions, clip.duration_s)
    pieces = sorted([(r.start_s, r.end_s) for r in regions] + gaps)
    if pieces:
        assert pieces[0][0] == 0.0
        assert pieces[-1][1] == pytest.approx(clip.duration_s)
        for (_, e), (s, _) in zip(pieces, pieces[1:]):
            assert e == pytest.approx(s)
        assert sum(e - s for s, e in pieces) == pytest.approx(clip.duration_s)
    flipped = detect_speech_regions(clip_of(-clip.samples))
    assert flipped == regions


def test_frame_rms_constant():
    rms = frame_rms(clip_of(np.full(1600, 0.25)), 0.03, 0.01)
    np.testing.assert_allclose(rms, 0.25)
