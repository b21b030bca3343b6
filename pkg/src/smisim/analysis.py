"""Measurement pipeline: noise floor, normalization, SNR, spectra, events.

The noise floor power P_noise is the mean squared deviation of the signal at
rest,

    sqrt(P_noise) = sqrt( (1/N) * sum_i |x_i - mean(x)|^2 ),

i.e. the population standard deviation of the rest window. Traces are
normalized by sqrt(P_noise) so channels with different units become
comparable, and SNR is the power ratio in dB: 10*log10(P_signal / P_noise).
For impulse-train recordings the peak-based form is used instead:
SNR = sum_i |p_i|^2 / (P_noise * n).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .trace import SampleTrace, Unit, check_window


class NoisePolicy(Enum):
    EXPLICIT_WINDOW = "explicit_window"
    WORST_CASE_SLIDING = "worst_case_sliding"


class SnrMethod(Enum):
    WINDOW_POWER = "window_power"
    PEAK_BASED = "peak_based"


class EventKind(Enum):
    SLIP = "slip"
    CONTACT = "contact"
    IMPULSE = "impulse"


@dataclass
class NoiseEstimate:
    sqrt_p_noise: float
    window: tuple[int, int]
    policy: NoisePolicy = NoisePolicy.EXPLICIT_WINDOW

    def __post_init__(self) -> None:
        if self.sqrt_p_noise < 0:
            raise ValueError("sqrt_p_noise must be >= 0")

    @property
    def p_noise(self) -> float:
        return self.sqrt_p_noise ** 2


@dataclass
class SnrReport:
    p_signal: float
    p_noise: float
    snr_db: float
    signal_window: tuple[int, int]
    noise_window: tuple[int, int]
    method: SnrMethod = SnrMethod.WINDOW_POWER

    def __post_init__(self) -> None:
        if self.p_noise <= 0:
            raise ValueError("p_noise must be > 0")
        recomputed = 10.0 * np.log10(self.p_signal / self.p_noise)
        if not np.isclose(recomputed, self.snr_db, rtol=0, atol=1e-9):
            raise ValueError(
                f"snr_db {self.snr_db} inconsistent with powers ({recomputed})"
            )


@dataclass
class SpectrumReport:
    """Normalized magnitude spectrum; DC bin excluded before normalization."""

    freqs_hz: np.ndarray
    normalized_magnitudes: np.ndarray
    window_s: float = 1.0
    degenerate: bool = False

    def __post_init__(self) -> None:
        self.freqs_hz = np.asarray(self.freqs_hz, dtype=float)
        self.normalized_magnitudes = np.asarray(self.normalized_magnitudes, dtype=float)
        if self.freqs_hz.shape != self.normalized_magnitudes.shape:
            raise ValueError("freqs_hz and normalized_magnitudes must match")

    @property
    def peak_freq_hz(self) -> float:
        if self.degenerate:
            raise ValueError("degenerate spectrum has no peak")
        return float(self.freqs_hz[int(np.argmax(self.normalized_magnitudes))])


@dataclass
class Event:
    start: int
    end: int
    peak_normalized_amplitude: float
    kind: EventKind = EventKind.SLIP

    def __post_init__(self) -> None:
        if self.end <= self.start:
            raise ValueError("event end must be > start")


@dataclass
class EventList:
    events: list[Event] = field(default_factory=list)

    def __post_init__(self) -> None:
        for prev, cur in zip(self.events, self.events[1:]):
            if cur.start < prev.end:
                raise ValueError("events must be sorted and non-overlapping")

    def __len__(self) -> int:
        return len(self.events)


def noise_floor(trace: SampleTrace, window: tuple[int, int]) -> NoiseEstimate:
    """Rest-window noise floor: population standard deviation over the window."""
    start, stop = check_window(window, len(trace), min_len=2)
    x = trace.samples[start:stop]
    return NoiseEstimate(float(np.std(x)), (start, stop), NoisePolicy.EXPLICIT_WINDOW)


def worst_case_noise(
    trace: SampleTrace,
    rest_region: tuple[int, int],
    window_len: int,
    exclusions: list[tuple[int, int]] | None = None,
) -> NoiseEstimate:
    """Maximum noise-floor estimate over sliding windows inside the rest region.

    The noise floor fluctuates, so analyses use the worst (largest) estimate:
    windows of ``window_len`` samples slide with a stride of half their length.
    ``exclusions`` are analyst-provided index ranges (start/stop transients)
    that no sliding window may overlap.
    """
    start, stop = check_window(rest_region, len(trace), min_len=2)
    if window_len < 2:
        raise ValueError("window_len must be >= 2 samples")
    if stop - start < window_len:
        raise ValueError(
            f"rest region of {stop - start} samples shorter than window {window_len}"
        )
    stride = max(1, window_len // 2)
    best = -1.0
    best_window = (start, start + window_len)
    for w0 in range(start, stop - window_len + 1, stride):
        w1 = w0 + window_len
        if exclusions and any(w0 < e1 and e0 < w1 for e0, e1 in exclusions):
            continue
        est = float(np.std(trace.samples[w0:w1]))
        if est > best:
            best = est
            best_window = (w0, w1)
    if best < 0:
        raise ValueError("no sliding window survives the exclusion windows")
    return NoiseEstimate(best, best_window, NoisePolicy.WORST_CASE_SLIDING)


def normalize(trace: SampleTrace, noise: NoiseEstimate) -> SampleTrace:
    """Divide by sqrt(P_noise) so the rest region has unit RMS by construction."""
    if noise.sqrt_p_noise <= 0:
        raise ValueError("degenerate recording: zero noise floor")
    return trace.with_samples(trace.samples / noise.sqrt_p_noise,
                              unit=Unit.DIMENSIONLESS)


def snr_db(
    trace: SampleTrace, signal_window: tuple[int, int], noise: NoiseEstimate
) -> SnrReport:
    """Window-power SNR: mean squared deviation of the signal window over P_noise."""
    start, stop = check_window(signal_window, len(trace), min_len=2)
    if noise.sqrt_p_noise <= 0:
        raise ValueError("degenerate recording: zero noise floor")
    p_signal = float(np.var(trace.samples[start:stop]))
    p_noise = noise.p_noise
    return SnrReport(
        p_signal=p_signal,
        p_noise=p_noise,
        snr_db=float(10.0 * np.log10(p_signal / p_noise)),
        signal_window=(start, stop),
        noise_window=noise.window,
        method=SnrMethod.WINDOW_POWER,
    )


def peak_snr(
    trace: SampleTrace, peaks: list[int], noise: NoiseEstimate
) -> SnrReport:
    """Peak-based SNR for drop events: sum |p_i|^2 / (P_noise * n), in dB.

    ``peaks`` are sample indices of the per-event peak amplitudes (ten drops
    in the source experiments; any n >= 1 is accepted).
    """
    if not len(peaks):
        raise ValueError("peak list must not be empty")
    idx = np.asarray(peaks, dtype=int)
    if np.any(idx < 0) or np.any(idx >= len(trace)):
        raise ValueError("peak index out of bounds")
    if noise.sqrt_p_noise <= 0:
        raise ValueError("degenerate recording: zero noise floor")
    p = trace.samples[idx]
    p_signal = float(np.sum(np.abs(p) ** 2) / idx.size)
    p_noise = noise.p_noise
    return SnrReport(
        p_signal=p_signal,
        p_noise=p_noise,
        snr_db=float(10.0 * np.log10(p_signal / p_noise)),
        signal_window=(int(idx.min()), int(idx.max()) + 1),
        noise_window=noise.window,
        method=SnrMethod.PEAK_BASED,
    )


def spectrum(
    trace: SampleTrace, window_start_s: float = 0.0, window_len_s: float = 1.0
) -> SpectrumReport:
    """Normalized Hann-windowed magnitude spectrum of a time window.

    Frequency resolution is 1/window_len_s. The DC component (window mean and
    bin 0) is excluded before normalizing the peak to 1, so an all-DC window
    is flagged degenerate instead of reporting a meaningless peak.
    """
    rate = trace.sample_rate_hz
    n = int(round(window_len_s * rate))
    if n < 64:
        raise ValueError(f"window of {n} samples too short (need >= 64)")
    start = int(round(window_start_s * rate))
    if start < 0 or start + n > len(trace):
        raise ValueError("analysis window extends outside the trace")
    chunk = trace.samples[start:start + n]
    seg = (chunk - np.mean(chunk)) * np.hanning(n)
    mags = np.abs(np.fft.rfft(seg))[1:]  # drop DC bin
    freqs = np.fft.rfftfreq(n, 1.0 / rate)[1:]
    peak = float(mags.max()) if mags.size else 0.0
    if peak <= 0:
        return SpectrumReport(freqs, np.zeros_like(mags), window_len_s, degenerate=True)
    return SpectrumReport(freqs, mags / peak, window_len_s)


def moving_rms(x: np.ndarray, window: int) -> np.ndarray:
    """Centered moving RMS with edge windows shrunk to the available samples."""
    window = max(1, int(window))
    csum = np.cumsum(np.concatenate([[0.0], x * x]))
    half = window // 2
    lo = np.clip(np.arange(x.size) - half, 0, x.size)
    hi = np.clip(np.arange(x.size) + window - half, 0, x.size)
    counts = np.maximum(hi - lo, 1)
    return np.sqrt((csum[hi] - csum[lo]) / counts)


def detect_events(
    normalized: SampleTrace,
    threshold: float,
    min_duration_s: float = 0.02,
    hold_s: float = 0.05,
    envelope_s: float = 0.02,
    kind: EventKind = EventKind.SLIP,
) -> EventList:
    """Threshold the moving-RMS envelope of a normalized trace with hysteresis.

    Input must be noise-floor normalized (unit rest RMS) so ``threshold`` is in
    noise-sigma units. Events enter at ``threshold`` and exit at half of it;
    gaps shorter than ``hold_s`` are merged, events shorter than
    ``min_duration_s`` are dropped.
    """
    if threshold <= 0:
        raise ValueError("threshold must be > 0")
    x = normalized.samples
    if x.size == 0:
        return EventList([])
    rate = normalized.sample_rate_hz
    env = moving_rms(x, int(round(envelope_s * rate)))
    exit_level = threshold / 2.0

    spans: list[list[int]] = []
    active = False
    start = 0
    for i, v in enumerate(env):
        if not active and v >= threshold:
            active = True
            start = i
        elif active and v < exit_level:
            spans.append([start, i])
            active = False
    if active:
        spans.append([start, env.size])

    # merge gaps shorter than hold_s
    hold = int(round(hold_s * rate))
    merged: list[list[int]] = []
    for span in spans:
        if merged and span[0] - merged[-1][1] < hold:
            merged[-1][1] = span[1]
        else:
            merged.append(span)

    min_len = int(round(min_duration_s * rate))
    events = [
        Event(s, e, float(np.max(np.abs(x[s:e]))), kind)
        for s, e in merged
        if e - s >= min_len
    ]
    return EventList(events)
