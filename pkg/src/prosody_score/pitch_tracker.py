"""Frame-wise F0 estimation with the YIN difference function.

Each frame of ``frame_s`` seconds is compared against lagged copies of itself
over an integration window of ``frame_len - max_lag`` samples. The cumulative
mean normalized difference (CMND) removes the dependence on signal level, so
the absolute threshold on its minimum doubles as the voicing decision.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .audio_io import AudioClip, frame_signal
from .errors import ConfigurationError

DEFAULT_F_MIN = 60.0
DEFAULT_F_MAX = 400.0
DEFAULT_FRAME_S = 0.04
DEFAULT_HOP_S = 0.01
DEFAULT_VOICING_THRESHOLD = 0.15


@dataclass(frozen=True, eq=False)
class PitchTrack:
    """Per-frame F0; unvoiced frames hold 0.0 and must not be averaged."""

    frame_times_s: np.ndarray
    f0_hz: np.ndarray
    voiced: np.ndarray
    hop_s: float
    f_min: float = DEFAULT_F_MIN
    f_max: float = DEFAULT_F_MAX

    def __post_init__(self):
        if not len(self.frame_times_s) == len(self.f0_hz) == len(self.voiced):
            raise ValueError("frame_times_s, f0_hz and voiced must have equal length")

    def __len__(self) -> int:
        return len(self.f0_hz)

    def voiced_f0_between(self, start_s: float, end_s: float) -> np.ndarray:
        """F0 of voiced frames whose centers fall within [start_s, end_s]."""
        mask = self.voiced & (self.frame_times_s >= start_s) & (self.frame_times_s <= end_s)
        return self.f0_hz[mask]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["time_s", "f0_hz", "voiced"])
            for t, f, v in zip(self.frame_times_s, self.f0_hz, self.voiced):
                writer.writerow([f"{t:.4f}", f"{f:.3f}", int(v)])


def cumulative_mean_normalized_difference(frames: np.ndarray, max_lag: int) -> np.ndarray:
    """CMND for lags 0..max_lag of every row of ``frames``.

    The squared difference d(lag) = E0 + E_lag - 2 r(lag) is assembled from
    windowed energies and an FFT cross-correlation.
    """
    n_frames, frame_len = frames.shape
    window = frame_len - max_lag
    if window <= 0:
        raise ConfigurationError("frame too short for the requested f_min")

    head = frames[:, :window]
    n_fft = 1 << int(math.ceil(math.log2(frame_len + window)))
    spec_full = np.fft.rfft(frames, n_fft, axis=1)
    spec_head = np.fft.rfft(head, n_fft, axis=1)
    xcorr = np.fft.irfft(spec_full * np.conj(spec_head), n_fft, axis=1)[:, : max_lag + 1]

    sq = np.concatenate((np.zeros((n_frames, 1)), np.cumsum(frames**2, axis=1)), axis=1)
    lags = np.arange(max_lag + 1)
    energy_lag = sq[:, lags + window] - sq[:, lags]
    energy_0 = energy_lag[:, :1]
    diff = np.maximum(energy_0 + energy_lag - 2.0 * xcorr, 0.0)

    cmnd = np.ones_like(diff)
    running = np.cumsum(diff[:, 1:], axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = diff[:, 1:] * lags[1:] / running
    cmnd[:, 1:] = np.where(running > 0, ratio, 1.0)
    return cmnd


def _pick_lag(cmnd_row: np.ndarray, lag_lo: int, lag_hi: int, threshold: float) -> float | None:
    below = np.flatnonzero(cmnd_row[lag_lo : lag_hi + 1] < threshold)
    if below.size == 0:
        return None
    lag = lag_lo + int(below[0])
    while lag + 1 <= lag_hi and cmnd_row[lag + 1] < cmnd_row[lag]:
        lag += 1
    if lag_lo < lag < lag_hi:
        left, mid, right = cmnd_row[lag - 1], cmnd_row[lag], cmnd_row[lag + 1]
        denom = left - 2.0 * mid + right
        if denom > 0:
            return lag + 0.5 * (left - right) / denom
    return float(lag)


def median_smooth_voiced(f0: np.ndarray, voiced: np.ndarray) -> np.ndarray:
    """3-frame median over voiced neighbours only, so unvoiced zeros never leak in."""
    out = f0.copy()
    for i in np.flatnonzero(voiced):
        lo, hi = max(0, i - 1), min(len(f0), i + 2)
        window = f0[lo:hi][voiced[lo:hi]]
        out[i] = float(np.median(window))
    return out


def track_pitch(
    clip: AudioClip,
    f_min: float = DEFAULT_F_MIN,
    f_max: float = DEFAULT_F_MAX,
    frame_s: float = DEFAULT_FRAME_S,
    hop_s: float = DEFAULT_HOP_S,
    voicing_threshold: float = DEFAULT_VOICING_THRESHOLD,
    smooth: bool = True,
) -> PitchTrack:
    rate = clip.sample_rate_hz
    if not 0 < f_min < f_max < rate / 2:
        raise ConfigurationError(f"need 0 < f_min < f_max < {rate / 2} Hz, got [{f_min}, {f_max}]")
    if not 0 < hop_s:
        raise ConfigurationError("hop_s must be positive")
    frame_len = int(round(frame_s * rate))
    hop = max(1, int(round(hop_s * rate)))
    if frame_len < 2 * rate / f_min:
        raise ConfigurationError(f"frame of {frame_s} s cannot hold two periods of {f_min} Hz")

    lag_lo = max(2, int(math.ceil(rate / f_max)))
    lag_hi = int(math.floor(rate / f_min))

    frames = frame_signal(clip.samples, frame_len, hop)
    n_frames = len(frames)
    times = (np.arange(n_frames) * hop + frame_len / 2) / rate
    f0 = np.zeros(n_frames)
    voiced = np.zeros(n_frames, dtype=bool)
    if n_frames == 0:
        return PitchTrack(times, f0, voiced, hop / rate, f_min, f_max)

    frames = frames - frames.mean(axis=1, keepdims=True)
    cmnd = cumulative_mean_normalized_difference(frames, lag_hi + 1)
    for i in range(n_frames):
        lag = _pick_lag(cmnd[i], lag_lo, lag_hi, voicing_threshold)
        if lag is not None:
            f0[i] = min(max(rate / lag, f_min), f_max)
            voiced[i] = True

    if smooth:
        f0 = median_smooth_voiced(f0, voiced)
    return PitchTrack(times, f0, voiced, hop / rate, f_min, f_max)
