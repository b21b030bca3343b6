"""Discrete-time model of the analog readout chain: TIA, HP, SA, AA, ADC.

Each analog stage is realized as a biquad designed by bilinear transform with
frequency prewarping at the stage cutoff, so the stated -3 dB points survive
discretization exactly. The chain runs at the physics rate and is decimated
to the ADC rate at the end, mirroring the physical circuit where the
Sallen-Key stage is the anti-aliasing filter.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.signal

from .trace import SampleTrace, Unit

# decimation ratios above this get an extra linear-phase guard FIR
_GUARD_RATIO = 20


@dataclass
class ReadoutConfig:
    """Gains, cutoffs and ADC parameters of the readout chain."""

    tia_gain_v_per_a: float = 40_000.0
    hp_cutoff_hz: float = 150.0
    sa_gain: float = 30.0
    aa_cutoff_hz: float = 2_000.0
    aa_quality: float = 0.7071
    adc_rate_hz: float = 10_000.0
    adc_bits: int = 12
    adc_fullscale_v: float = 5.0

    def __post_init__(self) -> None:
        for name in ("tia_gain_v_per_a", "hp_cutoff_hz", "sa_gain", "aa_cutoff_hz",
                     "aa_quality", "adc_rate_hz", "adc_fullscale_v"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if not self.hp_cutoff_hz < self.aa_cutoff_hz < self.adc_rate_hz / 2:
            raise ValueError(
                "require hp_cutoff_hz < aa_cutoff_hz < adc_rate_hz/2, got "
                f"{self.hp_cutoff_hz}, {self.aa_cutoff_hz}, {self.adc_rate_hz}"
            )
        if not 2 <= self.adc_bits <= 32:
            raise ValueError(f"adc_bits must be in [2, 32], got {self.adc_bits}")

    @property
    def lsb_v(self) -> float:
        return self.adc_fullscale_v / 2 ** self.adc_bits

    @property
    def settle_s(self) -> float:
        """Startup-transient exclusion: five time constants of the slowest stage."""
        return 5.0 / self.hp_cutoff_hz


@dataclass
class BiquadCoeffs:
    """Normalized biquad (a0 = 1) valid at a specific sample rate."""

    b0: float
    b1: float
    b2: float
    a1: float
    a2: float
    design_rate_hz: float

    def __post_init__(self) -> None:
        poles = np.roots([1.0, self.a1, self.a2])
        if poles.size and np.max(np.abs(poles)) >= 1.0:
            raise ValueError(f"unstable biquad: pole radius {np.max(np.abs(poles))}")

    @property
    def b(self) -> np.ndarray:
        return np.array([self.b0, self.b1, self.b2])

    @property
    def a(self) -> np.ndarray:
        return np.array([1.0, self.a1, self.a2])


def _check_cutoff(cutoff_hz: float, rate_hz: float) -> None:
    if not 0 < cutoff_hz < rate_hz / 2:
        raise ValueError(
            f"cutoff {cutoff_hz} Hz must lie in (0, {rate_hz / 2}) at rate {rate_hz}"
        )


def design_highpass(cutoff_hz: float, rate_hz: float) -> BiquadCoeffs:
    """First-order DC-rejecting high-pass, prewarped so |H(f_c)| = -3.01 dB."""
    _check_cutoff(cutoff_hz, rate_hz)
    g = np.tan(np.pi * cutoff_hz / rate_hz)
    a0 = 1.0 + g
    return BiquadCoeffs(
        b0=1.0 / a0, b1=-1.0 / a0, b2=0.0,
        a1=(g - 1.0) / a0, a2=0.0,
        design_rate_hz=rate_hz,
    )


def design_sallen_key_lowpass(cutoff_hz: float, q: float, rate_hz: float) -> BiquadCoeffs:
    """Second-order low-pass biquad equivalent of the Sallen-Key stage.

    Unity DC gain; q = 0.7071 gives the maximally flat (Butterworth) response
    with -3.01 dB at the prewarped cutoff and a zero at Nyquist.
    """
    _check_cutoff(cutoff_hz, rate_hz)
    if q <= 0:
        raise ValueError(f"quality factor must be > 0, got {q}")
    g = np.tan(np.pi * cutoff_hz / rate_hz)
    a0 = 1.0 + g / q + g * g
    return BiquadCoeffs(
        b0=g * g / a0, b1=2.0 * g * g / a0, b2=g * g / a0,
        a1=(2.0 * g * g - 2.0) / a0, a2=(1.0 - g / q + g * g) / a0,
        design_rate_hz=rate_hz,
    )


def frequency_response(coeffs: BiquadCoeffs, freq_hz) -> np.ndarray | float:
    """Analytic magnitude of H(e^{j 2 pi f / fs}) in dB (may be -inf at a zero)."""
    freq = np.asarray(freq_hz, dtype=float)
    if np.any(freq < 0) or np.any(freq > coeffs.design_rate_hz / 2):
        raise ValueError("probe frequency outside [0, Nyquist]")
    z = np.exp(-2j * np.pi * freq / coeffs.design_rate_hz)
    num = coeffs.b0 + coeffs.b1 * z + coeffs.b2 * z * z
    den = 1.0 + coeffs.a1 * z + coeffs.a2 * z * z
    with np.errstate(divide="ignore"):
        mag_db = 20.0 * np.log10(np.abs(num / den))
    return float(mag_db) if np.isscalar(freq_hz) else mag_db


def apply_filter(coeffs: BiquadCoeffs, trace: SampleTrace) -> SampleTrace:
    """Run the biquad over a trace (direct-form II transposed, zero state)."""
    if trace.sample_rate_hz != coeffs.design_rate_hz:
        raise ValueError(
            f"trace rate {trace.sample_rate_hz} != design rate {coeffs.design_rate_hz}"
        )
    out = scipy.signal.lfilter(coeffs.b, coeffs.a, trace.samples)
    return trace.with_samples(out)


def _guard_fir(in_rate: float, out_rate: float, n_taps: int = 127) -> np.ndarray:
    return scipy.signal.firwin(n_taps, 0.45 * out_rate, fs=in_rate)


def _resample(x: np.ndarray, in_rate: float, out_rate: float) -> np.ndarray:
    """Decimate to the ADC rate; plain stride for integer ratios (hardware-like)."""
    if in_rate == out_rate:
        return x
    ratio = in_rate / out_rate
    if abs(ratio - round(ratio)) < 1e-9:
        q = int(round(ratio))
        if q > _GUARD_RATIO:
            x = np.convolve(x, _guard_fir(in_rate, out_rate), mode="same")
        return x[::q]
    frac = Fraction(out_rate / in_rate).limit_denominator(10_000)
    return scipy.signal.resample_poly(x, frac.numerator, frac.denominator)


def resample_trace(trace: SampleTrace, out_rate: float) -> SampleTrace:
    """Trace resampled to a new rate using the chain's decimation policy."""
    samples = _resample(trace.samples, trace.sample_rate_hz, out_rate)
    return SampleTrace(samples, out_rate, trace.unit, dict(trace.meta))


def apply_chain(photocurrent: SampleTrace, cfg: ReadoutConfig) -> SampleTrace:
    """Run TIA -> HP -> SA -> AA at the input rate, then decimate to the ADC rate.

    Linear end to end (quantization is a separate step); output is in volts.
    """
    if photocurrent.unit is not Unit.AMPS:
        raise ValueError(f"chain input must be in amps, got {photocurrent.unit}")
    rate = photocurrent.sample_rate_hz
    if rate < 2 * cfg.aa_cutoff_hz:
        raise ValueError(
            f"input rate {rate} Hz cannot represent the {cfg.aa_cutoff_hz} Hz AA band"
        )
    hp = design_highpass(cfg.hp_cutoff_hz, rate)
    aa = design_sallen_key_lowpass(cfg.aa_cutoff_hz, cfg.aa_quality, rate)

    v = photocurrent.samples * cfg.tia_gain_v_per_a
    v = scipy.signal.lfilter(hp.b, hp.a, v)
    v = v * cfg.sa_gain
    v = scipy.signal.lfilter(aa.b, aa.a, v)
    v = _resample(v, rate, cfg.adc_rate_hz)
    out = SampleTrace(v, cfg.adc_rate_hz, Unit.VOLTS, dict(photocurrent.meta))
    return out


def quantize(trace: SampleTrace, cfg: ReadoutConfig) -> SampleTrace:
    """Mid-tread uniform quantizer over [-fullscale/2, +fullscale/2].

    Out-of-range values clip to the end codes; the clip count is recorded in
    the output metadata rather than raised.
    """
    lsb = cfg.lsb_v
    top_code = 2 ** (cfg.adc_bits - 1) - 1
    bottom_code = -(2 ** (cfg.adc_bits - 1))
    codes = np.round(trace.samples / lsb)
    clipped = int(np.count_nonzero((codes > top_code) | (codes < bottom_code)))
    codes = np.clip(codes, bottom_code, top_code)
    return trace.with_samples(codes * lsb, unit=Unit.VOLTS, clipped_samples=clipped)
