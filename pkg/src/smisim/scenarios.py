"""Synthetic excitation scenarios and the laser/microphone sensing channels.

All randomness descends from one top-level seed: child generators are derived
as ``default_rng(SeedSequence(seed, spawn_key=(stream,)))`` with a fixed
stream index per noise source, so every sub-trace is independently
reproducible from (seed, stream).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from .readout import ReadoutConfig, apply_chain, quantize
from .smi import LaserConfig, simulate_smi
from .trace import SampleTrace, Unit

# ANL mapping reference: measured baseline ambient level around the fingertips
REFERENCE_ANL_DB = 57.0

# quadrature standoff for the default 650 nm wavelength (lambda/8), so that
# sub-fringe vibrations modulate the interference term linearly
DEFAULT_STANDOFF_M = 650e-9 / 8

DEFAULT_PHYSICS_RATE_HZ = 200_000.0

# seed fan-out stream indices
STREAM_SCENARIO = 0
STREAM_MIC_AMBIENT = 1
STREAM_MIC_SELF = 2
STREAM_LASER_NOISE = 3


def substream(seed: int | None, stream: int) -> np.random.Generator:
    """Child RNG for (seed, stream); deterministic across runs and platforms."""
    if seed is None:
        return np.random.default_rng()
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))


class ScenarioKind(Enum):
    SINUSOID = "sinusoid"
    STEPPER = "stepper"
    SLIP_BURST = "slip_burst"
    IMPULSE_TRAIN = "impulse_train"
    SILENCE = "silence"


@dataclass
class ScenarioSpec:
    """Declarative description of one excitation; rendering is seed-exact."""

    kind: ScenarioKind
    duration_s: float
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    rate_hz: float = DEFAULT_PHYSICS_RATE_HZ

    def __post_init__(self) -> None:
        if isinstance(self.kind, str):
            self.kind = ScenarioKind(self.kind)
        if self.duration_s <= 0:
            raise ValueError(f"duration_s must be > 0, got {self.duration_s}")
        if self.rate_hz <= 0:
            raise ValueError(f"rate_hz must be > 0, got {self.rate_hz}")


@dataclass
class MicModel:
    """Linear microphone channel: gain, self noise and ambient pickup.

    ``ambient_coupling`` scales broadband ambient noise whose RMS follows
    10**((ANL - 57)/20) with the 57 dB baseline as reference; the laser channel
    has no such term, which is the modeled resilience asymmetry.
    """

    sensitivity: float = 1.0e6
    self_noise_rms: float = 1.0e-4
    ambient_coupling: float = 1.0e-3

    def __post_init__(self) -> None:
        if self.sensitivity <= 0:
            raise ValueError("sensitivity must be > 0")
        if self.self_noise_rms < 0 or self.ambient_coupling < 0:
            raise ValueError("noise terms must be >= 0")


def ambient_rms(anl_db: float) -> float:
    """Relative ambient RMS for an ambient noise level in dB (1.0 at 57 dB)."""
    return 10.0 ** ((anl_db - REFERENCE_ANL_DB) / 20.0)


def gen_sinusoid(
    freq_hz: float,
    amplitude_pp_m: float,
    duration_s: float,
    rate_hz: float = DEFAULT_PHYSICS_RATE_HZ,
    seed: int | None = None,
) -> SampleTrace:
    """Pure displacement sinusoid D(t) = (pp/2) * sin(2 pi f t), in meters."""
    if freq_hz >= rate_hz / 2:
        raise ValueError(f"{freq_hz} Hz aliases at rate {rate_hz}")
    if amplitude_pp_m < 0:
        raise ValueError("amplitude_pp_m must be >= 0")
    t = np.arange(int(round(duration_s * rate_hz))) / rate_hz
    d = (amplitude_pp_m / 2.0) * np.sin(2.0 * np.pi * freq_hz * t)
    return SampleTrace(d, rate_hz, Unit.METERS, {"scenario": "sinusoid"})


def gen_stepper(
    steps_per_s: float,
    fundamental_amplitude_m: float,
    harmonic_rolloff_db: float = 6.0,
    duration_s: float = 1.5,
    rate_hz: float = DEFAULT_PHYSICS_RATE_HZ,
    seed: int | None = None,
    n_harmonics: int = 5,
    offset_m: float = DEFAULT_STANDOFF_M,
) -> SampleTrace:
    """Stepper-motor-like vibration: harmonic stack plus a -40 dB noise floor.

    Harmonics above Nyquist are skipped; the precondition leaves room for at
    least three. ``offset_m`` is a static standoff that biases the
    interferometer near quadrature for small amplitudes.
    """
    if steps_per_s * 3 >= rate_hz / 2:
        raise ValueError(
            f"need 3 harmonics below Nyquist: {steps_per_s} steps/s at {rate_hz} Hz"
        )
    n = int(round(duration_s * rate_hz))
    t = np.arange(n) / rate_hz
    d = np.full(n, float(offset_m))
    for k in range(1, n_harmonics + 1):
        f_k = steps_per_s * k
        if f_k >= rate_hz / 2:
            break
        amp = fundamental_amplitude_m * 10.0 ** (-harmonic_rolloff_db * (k - 1) / 20.0)
        d += amp * np.sin(2.0 * np.pi * f_k * t)
    noise_rms = (fundamental_amplitude_m / np.sqrt(2.0)) * 1e-2  # -40 dB
    d += substream(seed, STREAM_SCENARIO).normal(0.0, noise_rms, n)
    return SampleTrace(d, rate_hz, Unit.METERS, {"scenario": "stepper"})


def gen_slip_burst(
    band_lo_hz: float,
    band_hi_hz: float,
    rms_m: float,
    onset_s: float,
    duration_s: float,
    total_s: float,
    rate_hz: float = DEFAULT_PHYSICS_RATE_HZ,
    seed: int | None = None,
    ramp_s: float = 0.010,
) -> SampleTrace:
    """Band-limited Gaussian slip burst embedded in silence.

    The burst is shaped by zeroing FFT bins outside [band_lo, band_hi]
    (brick wall, so band confinement is exact up to the onset/offset ramps),
    ramped with 10 ms raised-cosine edges, then scaled so the burst region has
    exactly the requested RMS.
    """
    if not 0 < band_lo_hz < band_hi_hz < rate_hz / 2:
        raise ValueError(
            f"band [{band_lo_hz}, {band_hi_hz}] must lie inside (0, {rate_hz / 2})"
        )
    if onset_s < 0 or onset_s + duration_s > total_s:
        raise ValueError("burst must fit inside the trace")
    if rms_m < 0:
        raise ValueError("rms_m must be >= 0")
    n = int(round(total_s * rate_hz))
    out = np.zeros(n)
    nb = int(round(duration_s * rate_hz))
    i0 = int(round(onset_s * rate_hz))
    if rms_m > 0 and nb > 0:
        white = substream(seed, STREAM_SCENARIO).normal(size=nb)
        spec = np.fft.rfft(white)
        freqs = np.fft.rfftfreq(nb, 1.0 / rate_hz)
        spec[(freqs < band_lo_hz) | (freqs > band_hi_hz)] = 0.0
        burst = np.fft.irfft(spec, n=nb)
        nr = min(int(round(ramp_s * rate_hz)), nb // 2)
        if nr > 0:
            ramp = 0.5 * (1.0 - np.cos(np.pi * np.arange(nr) / nr))
            burst[:nr] *= ramp
            burst[nb - nr:] *= ramp[::-1]
        burst *= rms_m / np.sqrt(np.mean(burst ** 2))
        out[i0:i0 + nb] = burst
    return SampleTrace(out, rate_hz, Unit.METERS, {"scenario": "slip_burst"})


def gen_impulse_train(
    peak_amplitudes_m,
    spacing_s: float,
    ring_freq_hz: float = 1_200.0,
    decay_tau_s: float = 0.020,
    rate_hz: float = DEFAULT_PHYSICS_RATE_HZ,
    start_s: float = 0.25,
) -> SampleTrace:
    """Drop-event train: one decaying sinusoid p_i * exp(-t/tau) * sin(2 pi f t)
    per object, uniformly spaced.

    Requires spacing > 5 tau so wavelets decay before the next event and their
    energies add within 1 %.
    """
    peaks = np.asarray(peak_amplitudes_m, dtype=float)
    if spacing_s <= 5 * decay_tau_s:
        raise ValueError("spacing_s must exceed 5 * decay_tau_s")
    total_s = start_s + spacing_s * peaks.size + 6 * decay_tau_s
    n = int(round(total_s * rate_hz))
    t = np.arange(n) / rate_hz
    out = np.zeros(n)
    for i, p in enumerate(peaks):
        t0 = start_s + i * spacing_s
        tail = t[t >= t0] - t0
        w = p * np.exp(-tail / decay_tau_s) * np.sin(2.0 * np.pi * ring_freq_hz * tail)
        out[n - tail.size:] += w
    return SampleTrace(out, rate_hz, Unit.METERS,
                       {"scenario": "impulse_train", "n_events": int(peaks.size)})


def render_scenario(spec: ScenarioSpec) -> SampleTrace:
    """Materialize a ScenarioSpec into a displacement trace (bit-exact per seed)."""
    p = spec.params
    if spec.kind is ScenarioKind.SINUSOID:
        return gen_sinusoid(p["freq_hz"], p["amplitude_pp_m"], spec.duration_s,
                            spec.rate_hz, spec.seed)
    if spec.kind is ScenarioKind.STEPPER:
        return gen_stepper(
            p["steps_per_s"], p["fundamental_amplitude_m"],
            p.get("harmonic_rolloff_db", 6.0), spec.duration_s, spec.rate_hz,
            spec.seed, int(p.get("n_harmonics", 5)),
            p.get("offset_m", DEFAULT_STANDOFF_M),
        )
    if spec.kind is ScenarioKind.SLIP_BURST:
        return gen_slip_burst(
            p["band_lo_hz"], p["band_hi_hz"], p["rms_m"], p["onset_s"],
            p["duration_s"], spec.duration_s, spec.rate_hz, spec.seed,
        )
    if spec.kind is ScenarioKind.IMPULSE_TRAIN:
        train = gen_impulse_train(
            p["peak_amplitudes_m"], p["spacing_s"],
            p.get("ring_freq_hz", 1_200.0), p.get("decay_tau_s", 0.020),
            spec.rate_hz, p.get("start_s", 0.25),
        )
        n_target = int(round(spec.duration_s * spec.rate_hz))
        if n_target < len(train):
            raise ValueError(
                f"impulse train of {train.duration_s:.2f}s does not fit in "
                f"duration_s = {spec.duration_s}"
            )
        padded = np.zeros(n_target)
        padded[:len(train)] = train.samples
        return train.with_samples(padded)
    if spec.kind is ScenarioKind.SILENCE:
        n = int(round(spec.duration_s * spec.rate_hz))
        return SampleTrace(np.zeros(n), spec.rate_hz, Unit.METERS,
                           {"scenario": "silence"})
    raise ValueError(f"unknown scenario kind {spec.kind}")


def mic_channel(
    vibration: SampleTrace,
    ambient_anl_db: float,
    model: MicModel | None = None,
    seed: int | None = None,
) -> SampleTrace:
    """Microphone output: scaled vibration plus ambient pickup plus self noise."""
    m = model or MicModel()
    n = len(vibration)
    amb = m.ambient_coupling * substream(seed, STREAM_MIC_AMBIENT).normal(
        0.0, ambient_rms(ambient_anl_db), n)
    self_noise = substream(seed, STREAM_MIC_SELF).normal(0.0, m.self_noise_rms, n)
    out = m.sensitivity * vibration.samples + amb + self_noise
    return vibration.with_samples(out, unit=Unit.DIMENSIONLESS,
                                  channel="mic", ambient_anl_db=ambient_anl_db)


def laser_channel(
    vibration: SampleTrace,
    laser: LaserConfig | None = None,
    cfg: ReadoutConfig | None = None,
    noise_rms_v: float = 0.0,
    seed: int | None = None,
) -> SampleTrace:
    """Full laser path: SMI physics, readout chain, optional electronic noise, ADC.

    The channel has no acoustic coupling, so its output is independent of the
    ambient noise level by construction. Electronic noise (ADC-input referred)
    is injected before quantization when ``noise_rms_v`` > 0.

    Fringe-rate metadata: the mean fringe rate mean(|dD/dt|) / (lambda/2) is
    compared against the AA cutoff; if it exceeds the cutoff the fringe energy
    folds into the passband and the trace is flagged ``aliased``.
    """
    laser = laser or LaserConfig()
    cfg = cfg or ReadoutConfig()
    current = simulate_smi(vibration, laser)
    volts = apply_chain(current, cfg)
    if noise_rms_v > 0:
        volts = volts.with_samples(
            volts.samples
            + substream(seed, STREAM_LASER_NOISE).normal(0.0, noise_rms_v,
                                                         len(volts)))
    out = quantize(volts, cfg)

    velocity = np.abs(np.diff(vibration.samples)) * vibration.sample_rate_hz
    mean_fringe_rate = (float(np.mean(velocity)) / (laser.wavelength_m / 2.0)
                        if velocity.size else 0.0)
    peak_fringe_rate = (float(np.max(velocity)) / (laser.wavelength_m / 2.0)
                        if velocity.size else 0.0)
    out.meta.update(
        channel="laser",
        mean_fringe_rate_hz=mean_fringe_rate,
        peak_fringe_rate_hz=peak_fringe_rate,
        aliased=bool(mean_fringe_rate > cfg.aa_cutoff_hz),
    )
    return out
