"""Tests for trace serialization: CSV and PCM16 WAV round trips."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smisim import SampleTrace, TraceFormatError, Unit, read_trace, write_trace
from smisim.traceio import ClippingWarning


class TestCsvRoundTrip:
    def test_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        trace = SampleTrace(rng.normal(0, 1e-6, 1000), 200_000.0, Unit.METERS,
                            {"channel": "displacement", "seed": 42})
        path = tmp_path / "trace.csv"
        write_trace(trace, path, "csv")
        back = read_trace(path, "csv")
        assert np.array_equal(back.samples, trace.samples)
        assert back.sample_rate_hz == trace.sample_rate_hz
        assert back.unit is Unit.METERS
        assert back.meta["channel"] == "displacement"

    @given(values=st.lists(st.floats(allow_nan=False, allow_infinity=False,
                                     width=64), min_size=0, max_size=200))
    @settings(max_examples=50, deadline=None)
    def test_bit_exact_property(self, tmp_path_factory, values):
        path = tmp_path_factory.mktemp("csv") / "t.csv"
        trace = SampleTrace(values, 12345.678, Unit.VOLTS)
        write_trace(trace, path, "csv")
        back = read_trace(path, "csv")
        assert np.array_equal(back.samples, trace.samples)
        assert back.sample_rate_hz == 12345.678

    def test_empty_trace_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        write_trace(SampleTrace([], 1000.0, Unit.AMPS), path, "csv")
        lines = path.read_text().splitlines()
        assert lines[-1] == "time_s,value"
        back = read_trace(path, "csv")
        assert len(back) == 0 and back.sample_rate_hz == 1000.0


class TestForeignCsv:
    def test_two_column_rate_inference(self, tmp_path):
        path = tmp_path / "foreign.csv"
        path.write_text("0.0,1.0\n0.0001,2.0\n0.0002,3.0\n")
        trace = read_trace(path, "csv")
        assert len(trace) == 3
        assert trace.sample_rate_hz == pytest.approx(10_000.0, rel=1e-9)
        assert trace.unit is Unit.DIMENSIONLESS

    def test_jitter_rejected(self, tmp_path):
        path = tmp_path / "jitter.csv"
        path.write_text("0.0,1.0\n0.0001,2.0\n0.000205,3.0\n")
        with pytest.raises(TraceFormatError, match="timestep"):
            read_trace(path, "csv")

    def test_malformed_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0.0,1.0\n0.0001,two\n")
        with pytest.raises(TraceFormatError, match="non-numeric"):
            read_trace(path, "csv")

    def test_wrong_column_count(self, tmp_path):
        path = tmp_path / "cols.csv"
        path.write_text("0.0,1.0,9\n")
        with pytest.raises(TraceFormatError, match="time_s,value"):
            read_trace(path, "csv")

    def test_headerless_single_row(self, tmp_path):
        path = tmp_path / "one.csv"
        path.write_text("0.0,1.0\n")
        with pytest.raises(TraceFormatError, match="header"):
            read_trace(path, "csv")


class TestWav:
    def test_round_trip(self, tmp_path):
        codes = np.array([0, 1, -1, 1000, -32768, 32767])
        trace = SampleTrace(codes / 32768.0, 10_000.0)
        path = tmp_path / "t.wav"
        write_trace(trace, path, "wav16")
        back = read_trace(path, "wav16")
        assert np.array_equal(back.samples, trace.samples)
        assert back.sample_rate_hz == 10_000.0

    def test_top_code_mapping(self, tmp_path):
        path = tmp_path / "top.wav"
        write_trace(SampleTrace([32767 / 32768.0], 8000.0), path, "wav16")
        back = read_trace(path, "wav16")
        assert back.samples[0] == 32767 / 32768

    def test_clipping_warns(self, tmp_path):
        path = tmp_path / "clip.wav"
        with pytest.warns(ClippingWarning):
            write_trace(SampleTrace([1.5, -2.0, 0.0], 8000.0), path, "wav16")
        back = read_trace(path, "wav16")
        assert back.samples[0] == 32767 / 32768
        assert back.samples[1] == -1.0

    def test_unsupported_stereo(self, tmp_path):
        import wave
        path = tmp_path / "stereo.wav"
        with wave.open(str(path), "wb") as w:
            w.setnchannels(2)
            w.setsampwidth(2)
            w.setframerate(8000)
            w.writeframes(b"\x00\x00\x00\x00")
        with pytest.raises(TraceFormatError, match="mono"):
            read_trace(path, "wav16")

    def test_unsupported_width(self, tmp_path):
        import wave
        path = tmp_path / "w8.wav"
        with wave.open(str(path), "wb") as w:
            w.setnchannels(1)
            w.setsampwidth(1)
            w.setframerate(8000)
            w.writeframes(b"\x00\x00")
        with pytest.raises(TraceFormatError, match="16-bit"):
            read_trace(path, "wav16")


class TestFormatDispatch:
    def test_unknown_format(self, tmp_path):
        trace = SampleTrace([1.0], 100.0)
        with pytest.raises(ValueError, match="format"):
            write_trace(trace, tmp_path / "x.bin", "flac")
        with pytest.raises(ValueError, match="format"):
            read_trace(tmp_path / "x.bin", "flac")

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            read_trace(tmp_path / "nope.csv", "csv")
