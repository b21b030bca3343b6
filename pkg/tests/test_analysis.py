"""Tests for the measurement pipeline: noise floor, SNR, spectra, detection."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smisim import (
    EventKind,
    NoiseEstimate,
    NoisePolicy,
    SampleTrace,
    SnrMethod,
    detect_events,
    noise_floor,
    normalize,
    peak_snr,
    snr_db,
    spectrum,
    worst_case_noise,
)

RATE = 10_000.0


def direct_noise_power(x: np.ndarray) -> float:
    """Two-pass mean-squared-deviation oracle, written out longhand."""
    mean = sum(x) / len(x)
    return sum(abs(v - mean) ** 2 for v in x) / len(x)


class TestNoiseFloor:
    def test_constant_window_is_zero(self):
        trace = SampleTrace(np.full(100, 7.5), RATE)
        assert noise_floor(trace, (0, 100)).sqrt_p_noise == 0.0

    def test_alternating_unit_window(self):
        trace = SampleTrace([1.0, -1.0, 1.0, -1.0], RATE)
        assert noise_floor(trace, (0, 4)).sqrt_p_noise == pytest.approx(1.0)

    def test_gaussian_statistics(self):
        rng = np.random.default_rng(11)
        trace = SampleTrace(rng.normal(0.0, 0.5, 10_000), RATE)
        est = noise_floor(trace, (0, 10_000))
        assert est.sqrt_p_noise == pytest.approx(0.5, rel=0.02)
        assert est.policy is NoisePolicy.EXPLICIT_WINDOW

    def test_matches_direct_formula(self):
        rng = np.random.default_rng(12)
        x = rng.normal(2.0, 1.3, 500)
        trace = SampleTrace(x, RATE)
        got = noise_floor(trace, (0, 500)).sqrt_p_noise ** 2
        assert got == pytest.approx(direct_noise_power(list(x)), rel=1e-12)

    def test_short_window_rejected(self):
        trace = SampleTrace(np.zeros(10), RATE)
        with pytest.raises(ValueError):
            noise_floor(trace, (0, 1))


class TestWorstCaseNoise:
    def test_constant_region(self):
        trace = SampleTrace(np.full(1000, 1.0), RATE)
        assert worst_case_noise(trace, (0, 1000), 100).sqrt_p_noise == 0.0

    def test_picks_noisy_half(self):
        rng = np.random.default_rng(13)
        quiet = rng.normal(0.0, 0.1, 5000)
        loud = rng.normal(0.0, 0.3, 5000)
        trace = SampleTrace(np.concatenate([quiet, loud]), RATE)
        est = worst_case_noise(trace, (0, 10_000), 1000)
        assert est.sqrt_p_noise == pytest.approx(0.3, rel=0.05)
        assert est.window[0] >= 4500  # found inside the loud half

    def test_degenerate_single_window(self):
        rng = np.random.default_rng(14)
        trace = SampleTrace(rng.normal(size=500), RATE)
        est = worst_case_noise(trace, (100, 400), 300)
        ref = noise_floor(trace, (100, 400))
        assert est.sqrt_p_noise == ref.sqrt_p_noise
        assert est.window == (100, 400)

    def test_dominates_contained_windows(self):
        rng = np.random.default_rng(15)
        trace = SampleTrace(rng.normal(size=4000), RATE)
        est = worst_case_noise(trace, (0, 4000), 500)
        for w0 in range(0, 3500, 250):
            assert est.sqrt_p_noise >= noise_floor(trace, (w0, w0 + 500)).sqrt_p_noise - 1e-15

    def test_exclusions_are_skipped(self):
        x = np.zeros(2000)
        x[900:1100] = 50.0 * np.sin(np.arange(200))  # transient to exclude
        trace = SampleTrace(x, RATE)
        with_spike = worst_case_noise(trace, (0, 2000), 200)
        without = worst_case_noise(trace, (0, 2000), 200, exclusions=[(900, 1100)])
        assert with_spike.sqrt_p_noise > 1.0
        assert without.sqrt_p_noise == 0.0

    def test_region_too_short(self):
        trace = SampleTrace(np.zeros(100), RATE)
        with pytest.raises(ValueError):
            worst_case_noise(trace, (0, 50), 100)


class TestNormalize:
    def test_self_normalization_unit_rms(self):
        rng = np.random.default_rng(16)
        trace = SampleTrace(rng.normal(0.0, 3.0, 5000), RATE)
        est = noise_floor(trace, (0, 5000))
        out = normalize(trace, est)
        rms = np.sqrt(np.mean((out.samples - out.samples.mean()) ** 2))
        assert rms == pytest.approx(1.0, abs=1e-9)

    def test_scale_invariance(self):
        rng = np.random.default_rng(17)
        x = rng.normal(size=1000)
        t1 = SampleTrace(x, RATE)
        t2 = SampleTrace(2.0 * x, RATE)
        n1 = noise_floor(t1, (0, 1000))
        n2 = NoiseEstimate(2.0 * n1.sqrt_p_noise, n1.window)
        assert np.allclose(normalize(t1, n1).samples, normalize(t2, n2).samples,
                           rtol=1e-12)

    def test_zero_noise_rejected(self):
        trace = SampleTrace(np.ones(100), RATE)
        with pytest.raises(ValueError, match="degenerate"):
            normalize(trace, noise_floor(trace, (0, 100)))


class TestSnrDb:
    def build_trace(self, ratio: float, n: int = 4000):
        """Noise window plus a signal window scaled to an exact RMS ratio."""
        rng = np.random.default_rng(18)
        noise = rng.normal(0.0, 1.0, n)
        return SampleTrace(np.concatenate([noise, ratio * noise]), RATE)

    def test_noise_window_is_zero_db(self):
        trace = self.build_trace(10.0)
        est = noise_floor(trace, (0, 4000))
        report = snr_db(trace, (0, 4000), est)
        assert report.snr_db == pytest.approx(0.0, abs=1e-12)

    def test_ten_to_one_ratio(self):
        trace = self.build_trace(10.0)
        est = noise_floor(trace, (0, 4000))
        report = snr_db(trace, (4000, 8000), est)
        assert report.snr_db == pytest.approx(20.0, abs=0.1)

    def test_cable_slip_ratio(self):
        # an RMS ratio of 12.9 regenerates the 22.2 dB cable-slip laser figure
        trace = self.build_trace(12.9)
        est = noise_floor(trace, (0, 4000))
        report = snr_db(trace, (4000, 8000), est)
        assert report.snr_db == pytest.approx(22.2, abs=0.2)
        assert report.method is SnrMethod.WINDOW_POWER

    @given(scale=st.floats(1e-6, 1e6))
    @settings(max_examples=50, deadline=None)
    def test_scale_invariance(self, scale):
        trace = self.build_trace(10.0, n=500)
        scaled = SampleTrace(scale * trace.samples, RATE)
        r1 = snr_db(trace, (500, 1000), noise_floor(trace, (0, 500)))
        r2 = snr_db(scaled, (500, 1000), noise_floor(scaled, (0, 500)))
        assert abs(r1.snr_db - r2.snr_db) < 1e-9

    def test_report_consistency_enforced(self):
        from smisim.analysis import SnrReport
        with pytest.raises(ValueError):
            SnrReport(p_signal=4.0, p_noise=1.0, snr_db=10.0,
                      signal_window=(0, 10), noise_window=(0, 10))


class TestPeakSnr:
    def test_unity_peaks_zero_db(self):
        trace = SampleTrace(np.ones(100), RATE)
        est = NoiseEstimate(1.0, (0, 50))
        report = peak_snr(trace, list(range(10)), est)
        assert report.snr_db == pytest.approx(0.0, abs=1e-12)

    def test_ten_sigma_peaks(self):
        x = np.zeros(100)
        peaks = list(range(5, 100, 10))
        x[peaks] = 10.0 * 0.5  # 10 * sqrt(P_noise) with sigma = 0.5
        trace = SampleTrace(x, RATE)
        report = peak_snr(trace, peaks, NoiseEstimate(0.5, (0, 5)))
        assert report.snr_db == pytest.approx(20.0, abs=1e-9)
        assert report.method is SnrMethod.PEAK_BASED

    def test_mixed_peaks_direct_sum(self):
        amplitudes = np.array([2.0, 2.0] + [1.0] * 8)
        x = np.zeros(200)
        peaks = list(range(10, 200, 19))
        x[peaks] = amplitudes
        report = peak_snr(SampleTrace(x, RATE), peaks, NoiseEstimate(1.0, (0, 5)))
        expected = 10 * np.log10(np.sum(amplitudes ** 2) / 10.0)
        assert report.snr_db == pytest.approx(expected, abs=1e-12)

    def test_empty_peaks_rejected(self):
        trace = SampleTrace(np.zeros(10), RATE)
        with pytest.raises(ValueError):
            peak_snr(trace, [], NoiseEstimate(1.0, (0, 5)))


class TestSpectrum:
    def test_pure_tone_peak_location(self):
        t = np.arange(int(2 * RATE)) / RATE
        trace = SampleTrace(np.sin(2 * np.pi * 500.0 * t), RATE)
        report = spectrum(trace, 0.5, 1.0)
        assert abs(report.peak_freq_hz - 500.0) <= 1.0
        assert np.max(report.normalized_magnitudes) == 1.0

    def test_dc_only_degenerate(self):
        trace = SampleTrace(np.full(int(2 * RATE), 3.0), RATE)
        report = spectrum(trace, 0.0, 1.0)
        assert report.degenerate
        with pytest.raises(ValueError):
            _ = report.peak_freq_hz

    def test_two_equal_tones(self):
        t = np.arange(int(RATE)) / RATE
        x = np.sin(2 * np.pi * 500.0 * t) + np.sin(2 * np.pi * 1000.0 * t)
        report = spectrum(SampleTrace(x, RATE), 0.0, 1.0)
        mags = report.normalized_magnitudes
        freqs = report.freqs_hz
        m500 = mags[np.argmin(np.abs(freqs - 500.0))]
        m1000 = mags[np.argmin(np.abs(freqs - 1000.0))]
        assert abs(m500 - m1000) / max(m500, m1000) < 0.01

    def test_peak_location_across_band(self):
        df = 1.0
        for freq in (10 * df, 100.0, 997.0, 0.9 * RATE / 2):
            t = np.arange(int(RATE)) / RATE
            trace = SampleTrace(np.sin(2 * np.pi * freq * t), RATE)
            report = spectrum(trace, 0.0, 1.0)
            assert abs(report.peak_freq_hz - freq) <= df + 1e-9

    def test_window_too_short(self):
        trace = SampleTrace(np.zeros(100), RATE)
        with pytest.raises(ValueError):
            spectrum(trace, 0.0, 0.001)

    def test_window_outside_trace(self):
        trace = SampleTrace(np.zeros(int(RATE)), RATE)
        with pytest.raises(ValueError):
            spectrum(trace, 0.5, 1.0)


class TestDetectEvents:
    def test_noise_only_false_alarms(self):
        # over 100 seeded runs of unit-RMS noise, at most one spurious event
        total = 0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            trace = SampleTrace(rng.normal(0.0, 1.0, int(RATE)), RATE)
            total += len(detect_events(trace, threshold=4.0))
        assert total <= 1

    def test_embedded_burst_single_event(self):
        rng = np.random.default_rng(21)
        x = rng.normal(0.0, 1.0, int(2 * RATE))
        b0, b1 = int(0.8 * RATE), int(1.3 * RATE)
        x[b0:b1] += rng.normal(0.0, 12.9, b1 - b0)  # ~22.2 dB burst
        events = detect_events(SampleTrace(x, RATE), threshold=4.0)
        assert len(events) == 1
        ev = events.events[0]
        tol = int(0.025 * RATE)
        assert abs(ev.start - b0) <= tol
        assert abs(ev.end - b1) <= tol
        assert ev.kind is EventKind.SLIP

    def test_zero_length_trace(self):
        assert len(detect_events(SampleTrace([], RATE), threshold=4.0)) == 0

    def test_threshold_monotonicity(self):
        rng = np.random.default_rng(22)
        x = rng.normal(0.0, 1.0, int(2 * RATE))
        x[5000:6000] += rng.normal(0.0, 6.0, 1000)
        x[12000:12500] += rng.normal(0.0, 5.0, 500)
        trace = SampleTrace(x, RATE)
        counts = [len(detect_events(trace, threshold=th))
                  for th in (2.0, 3.0, 4.0, 6.0, 10.0)]
        assert all(b <= a for a, b in zip(counts, counts[1:]))
