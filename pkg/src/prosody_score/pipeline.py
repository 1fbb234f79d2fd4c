"""One candidate reading, end to end: audio + ASR + reference text → features."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import __version__
from .audio_io import AudioClip, detect_speech_regions, read_wav
from .config import Config
from .errors import InputMissingError, ValidationError
from .intonation import IntonationProfile, ProfileStore, WordPitchVector, sim_intonation, word_pitch_vector
from .pitch_tracker import PitchTrack, track_pitch
from .prosody import FluencyMetrics, PauseEvent, extract_pauses, fluency_metrics
from .scoring.features import FeatureVector, assemble_features
from .serialize import sha256_file
from .transcript_align import AlignmentOp, AsrResult, accuracy_score, align_words, parse_asr_json, tokenize


@dataclass
class Analysis:
    sentence_id: str
    clip: AudioClip
    asr: AsrResult
    lexical: AsrResult
    reference: list[str]
    distance: int
    alignment: list[AlignmentOp]
    accuracy: float
    pauses: list[PauseEvent]
    fluency: FluencyMetrics
    track: PitchTrack
    pitch_vector: WordPitchVector
    sim: Optional[float]
    vector: FeatureVector
    profile_found: bool


def _read_text(path, what: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except FileNotFoundError as exc:
        raise InputMissingError(f"{what} not found: {path}") from exc


def load_audio(path) -> AudioClip:
    if not os.path.exists(path):
        raise InputMissingError(f"audio not found: {path}")
    return read_wav(path)


def load_asr(path) -> AsrResult:
    return parse_asr_json(_read_text(path, "ASR document"))


def load_reference(path) -> list[str]:
    words = tokenize(_read_text(path, "reference text"))
    if not words:
        raise ValidationError(f"reference text is empty: {path}")
    return words


def default_sentence_id(ref_text_path) -> str:
    return Path(ref_text_path).stem


def check_word_times(asr: AsrResult, clip: AudioClip, tolerance_s: float) -> None:
    if asr.words and asr.words[-1].end_s > clip.duration_s + tolerance_s:
        raise ValidationError(
            f"word {asr.words[-1].token!r} ends at {asr.words[-1].end_s} s, past the audio end {clip.duration_s} s"
        )


def analyze(
    clip: AudioClip,
    asr: AsrResult,
    reference: list[str],
    config: Config,
    sentence_id: str,
    profile: Optional[IntonationProfile] = None,
    candidate_id: Optional[str] = None,
) -> Analysis:
    check_word_times(asr, clip, config.word_time_tolerance_s)
    fillers = frozenset(config.fillers)
    lexical = asr.without(fillers)

    distance, ops = align_words(reference, lexical.tokens)
    accuracy = accuracy_score(reference, lexical.tokens)
    pauses = extract_pauses(asr, fillers, config.min_pause_s, config.long_pause_s)
    fluency = fluency_metrics(asr, pauses, filler_lexicon=fillers)

    track = track_pitch(
        clip,
        f_min=config.pitch_f_min,
        f_max=config.pitch_f_max,
        frame_s=config.pitch_frame_s,
        hop_s=config.pitch_hop_s,
        voicing_threshold=config.voicing_threshold,
    )
    vector = word_pitch_vector(track, lexical, ops, sentence_id)
    sim = None
    if profile is not None:
        sim = sim_intonation(profile, vector, config.min_points, config.pitch_scale)

    features = assemble_features(candidate_id or asr.source_id, accuracy, fluency, sim, asr)
    return Analysis(
        sentence_id, clip, asr, lexical, reference, distance, ops, accuracy,
        pauses, fluency, track, vector, sim, features, profile is not None,
    )


def analyze_files(
    audio_path,
    asr_path,
    ref_text_path,
    config: Config,
    sentence_id: Optional[str] = None,
    profiles: Optional[ProfileStore] = None,
    candidate_id: Optional[str] = None,
) -> Analysis:
    sentence_id = sentence_id or default_sentence_id(ref_text_path)
    clip = load_audio(audio_path)
    asr = load_asr(asr_path)
    reference = load_reference(ref_text_path)
    profile = profiles.get(sentence_id) if profiles is not None else None
    return analyze(clip, asr, reference, config, sentence_id, profile, candidate_id)


def feature_details(a: Analysis, config: Config) -> dict:
    regions = detect_speech_regions(a.clip, config.vad_frame_s, config.vad_hop_s, config.vad_rms_threshold)
    return {
        "accuracy": {
            "distance": a.distance,
            "reference_words": len(a.reference),
            "recognized_words": len(a.lexical.words),
            "edits": [
                {"kind": op.kind, "ref_index": op.ref_index, "hyp_index": op.hyp_index}
                for op in a.alignment
                if op.kind != "match"
            ],
        },
        "fluency": {
            "speaking_span_s": a.fluency.speaking_span_s,
            "phonation_time_s": a.fluency.phonation_time_s,
            "word_count": a.fluency.word_count,
            "syllable_count": a.fluency.syllable_count,
            "pause_counts": a.fluency.pause_counts,
        },
        "pauses": [
            {"start_s": p.start_s, "end_s": p.end_s, "duration_s": p.duration_s, "kind": p.kind,
             "filler_token": p.filler_token}
            for p in a.pauses
        ],
        "intonation": {
            "profile_found": a.profile_found,
            "sim_intonation_present": a.sim is not None,
            "word_pitch_hz": list(a.pitch_vector.values),
            "voiced_frames": int(a.track.voiced.sum()),
            "frames": len(a.track),
        },
        "audio": {
            "sample_rate_hz": a.clip.sample_rate_hz,
            "duration_s": a.clip.duration_s,
            "warnings": list(a.clip.warnings),
            "speech_regions": [[r.start_s, r.end_s] for r in regions],
        },
    }


def run_manifest(config: Config, inputs: dict[str, Optional[str]]) -> dict:
    """Config snapshot, input digests (by file name, not path) and tool version."""
    digests = {}
    for name, path in inputs.items():
        if path is None:
            digests[name] = None
        else:
            digests[name] = {"file": Path(path).name, "sha256": sha256_file(path)}
    return {
        "tool": "prosody-score",
        "version": __version__,
        "seed": config.seed,
        "config": config.to_dict(),
        "inputs": digests,
    }
