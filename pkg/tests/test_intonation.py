import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prosody_score.errors import ProfileMismatchError, ValidationError
from prosody_score.intonation import (
    IntonationProfile,
    ProfileStore,
    WordPitchVector,
    mean_present,
    sim_intonation,
    train_profile,
    word_pitch_vector,
)
from prosody_score.pitch_tracker import PitchTrack
from prosody_score.transcript_align import align_words, parse_asr_json

from synth import asr_json


def _track(times, f0):
    f0 = np.asarray(f0, dtype=float)
    return PitchTrack(np.asarray(times, dtype=float), f0, f0 > 0, 0.01)


def test_word_mean_over_voiced_frames():
    track = _track([0.10, 0.11, 0.12, 0.30, 0.31], [200, 210, 190, 0, 0])
    doc = parse_asr_json(asr_json([("adam", 0.09, 0.13), ("walks", 0.29, 0.32)]))
    _, ops = align_words(["adam", "walks"], doc.tokens)
    vec = word_pitch_vector(track, doc, ops, "s1")
    assert vec.values == (200.0, None)
    assert vec.n_words == 2


def test_deleted_and_substituted_words_absent():
    track = _track(np.arange(0, 1, 0.01), [150] * 100)
    doc = parse_asr_json(asr_json([("adam", 0.0, 0.2), ("want", 0.3, 0.5), ("walk", 0.6, 0.8)]))
    ref = ["adam", "wants", "to", "walk"]
    _, ops = align_words(ref, doc.tokens)
    vec = word_pitch_vector(track, doc, ops, "s1")
    assert vec.values == (150.0, None, None, 150.0)


def test_train_profile_examples():
    p = train_profile(None, WordPitchVector("s", (200.0, 180.0, 220.0)))
    assert p.means() == (200.0, 180.0, 220.0)
    assert p.trained_by == 1
    p2 = train_profile(p, WordPitchVector("s", (210.0, 190.0, 230.0)))
    assert p2.means() == (205.0, 185.0, 225.0)
    assert p2.trained_by == 2
    p3 = train_profile(p, WordPitchVector("s", (210.0, None, 230.0)))
    assert p3.means() == (205.0, 180.0, 225.0)
    assert p3.counts == (2, 1, 2)


def test_train_profile_mismatch():
    p = IntonationProfile.fresh("s", 3)
    with pytest.raises(ProfileMismatchError):
        train_profile(p, WordPitchVector("other", (1.0, 2.0, 3.0)))
    with pytest.raises(ProfileMismatchError):
        train_profile(p, WordPitchVector("s", (1.0, 2.0)))


pitch = st.one_of(st.none(), st.floats(80, 350))


@settings(max_examples=30)
@given(st.lists(st.lists(pitch, min_size=5, max_size=5), min_size=1, max_size=4))
def test_training_order_independent(vectors):
    vecs = [WordPitchVector("s", tuple(v)) for v in vectors]
    results = set()
    for perm in itertools.permutations(vecs):
        p = None
        for v in perm:
            p = train_profile(p, v)
        assert all(c <= p.trained_by for c in p.counts)
        results.add(tuple(None if m is None else round(m, 9) for m in p.means()))
    assert len(results) == 1


def test_sim_examples():
    means = (200.0, 180.0, 220.0, 190.0)
    profile = train_profile(None, WordPitchVector("s", means))
    assert sim_intonation(profile, WordPitchVector("s", means)) == pytest.approx(1.0, abs=1e-12)
    affine = WordPitchVector("s", tuple(1.7 * m + 12 for m in means))
    assert sim_intonation(profile, affine) == pytest.approx(1.0, abs=1e-12)
    two = WordPitchVector("s", (200.0, None, None, 190.0))
    assert sim_intonation(profile, two, min_points=3) is None


def test_sim_negated_shape():
    means = (200.0, 180.0, 220.0, 190.0, 250.0)
    profile = train_profile(None, WordPitchVector("s", means))
    flipped = WordPitchVector("s", tuple(600 - m for m in means))
    assert sim_intonation(profile, flipped) == pytest.approx(-1.0, abs=1e-12)


def test_sim_constant_side_absent():
    profile = train_profile(None, WordPitchVector("s", (200.0, 180.0, 220.0)))
    assert sim_intonation(profile, WordPitchVector("s", (150.0, 150.0, 150.0))) is None


def test_sim_mismatch():
    profile = IntonationProfile.fresh("s", 3)
    with pytest.raises(ProfileMismatchError):
        sim_intonation(profile, WordPitchVector("t", (1.0, 2.0, 3.0)))


def test_sim_semitone_scale():
    means = (200.0, 180.0, 220.0, 190.0)
    profile = train_profile(None, WordPitchVector("s", means))
    doubled = WordPitchVector("s", tuple(2 * m for m in means))
    assert sim_intonation(profile, doubled, scale="semitone") == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        sim_intonation(profile, doubled, scale="mel")


@settings(max_examples=60)
@given(
    st.lists(st.floats(80, 350), min_size=3, max_size=12),
    st.lists(st.floats(80, 350), min_size=12, max_size=12),
    st.floats(0.1, 10),
    st.floats(-60, 200),
)
def test_sim_affine_invariance_and_range(p, t, scale, offset):
    t = t[: len(p)]
    profile = train_profile(None, WordPitchVector("s", tuple(p)))
    test = WordPitchVector("s", tuple(t))
    r = sim_intonation(profile, test)
    if r is None:
        return
    assert -1.0 <= r <= 1.0
    moved_profile = train_profile(None, WordPitchVector("s", tuple(scale * x + offset + 100 for x in p)))
    moved_test = WordPitchVector("s", tuple(scale * x + offset + 100 for x in t))
    assert sim_intonation(moved_profile, moved_test) == pytest.approx(r, abs=1e-9)


def test_profile_store_roundtrip_and_merge(tmp_path):
    a = train_profile(None, WordPitchVector("s1", (200.0, None, 220.0)))
    store = ProfileStore()
    store.add(a)
    store.add(a)
    merged = store.get("s1")
    assert merged.trained_by == 2
    assert merged.counts == (2, 0, 2)
    assert merged.means() == a.means()

    doc = store.to_dict()
    assert doc["profiles"][0]["per_word"][0] == {"sum_f0_hz": 400.0, "count": 2}
    again = ProfileStore.from_dict(doc)
    assert again.get("s1") == merged


def test_profile_from_dict_validation():
    bad = IntonationProfile("s", (1.0,), (3,), 1).to_dict()
    with pytest.raises(ValidationError):
        IntonationProfile.from_dict(bad)
    with pytest.raises(ValidationError):
        IntonationProfile.from_dict({"sentence_id": "s"})
    doc = IntonationProfile.fresh("s", 2).to_dict()
    doc["n_words"] = 3
    with pytest.raises(ValidationError):
        IntonationProfile.from_dict(doc)


def test_mean_present():
    assert mean_present([0.5, None, 1.0]) == 0.75
    assert mean_present([None]) is None
