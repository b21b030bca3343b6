"""Bit-exact trace serialization: commented-header CSV and 16-bit PCM WAV."""
from __future__ import annotations

import os
import wave
import warnings

import numpy as np

from .trace import SampleTrace, Unit

FORMAT_VERSION = 1
_HEADER_MAGIC = "smisim-trace"

# time-column jitter tolerance when inferring the rate from a foreign CSV
_JITTER_REL_TOL = 1e-6


class TraceFormatError(ValueError):
    """A trace file violates the expected on-disk format."""


class ClippingWarning(UserWarning):
    """Samples were clipped to fit the target encoding's range."""


def write_trace(trace: SampleTrace, path: str | os.PathLike, fmt: str = "csv") -> None:
    """Serialize a trace. CSV preserves samples bit-exactly (repr round-trip);
    WAV maps to 16-bit PCM in [-1, 1) and warns when values clip."""
    if fmt == "csv":
        _write_csv(trace, path)
    elif fmt == "wav16":
        _write_wav(trace, path)
    else:
        raise ValueError(f"unknown trace format {fmt!r}")


def read_trace(path: str | os.PathLike, fmt: str = "csv") -> SampleTrace:
    """Deserialize a trace written by write_trace (or a foreign 2-column CSV)."""
    if fmt == "csv":
        return _read_csv(path)
    if fmt == "wav16":
        return _read_wav(path)
    raise ValueError(f"unknown trace format {fmt!r}")


def _write_csv(trace: SampleTrace, path) -> None:
    rate = float(trace.sample_rate_hz)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# {_HEADER_MAGIC} v{FORMAT_VERSION}\n")
        f.write(f"# sample_rate_hz: {rate!r}\n")
        f.write(f"# unit: {trace.unit.value}\n")
        for key in sorted(trace.meta):
            f.write(f"# {key}: {trace.meta[key]}\n")
        f.write("time_s,value\n")
        for i, v in enumerate(trace.samples.tolist()):
            f.write(f"{i / rate!r},{v!r}\n")


def _read_csv(path) -> SampleTrace:
    header: dict[str, str] = {}
    times: list[float] = []
    values: list[float] = []
    saw_columns = False
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if ":" in body:
                    key, _, val = body.partition(":")
                    header[key.strip()] = val.strip()
                continue
            if not saw_columns and line.replace(" ", "") == "time_s,value":
                saw_columns = True
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise TraceFormatError(
                    f"{path}: line {lineno}: expected 'time_s,value', got {line!r}"
                )
            try:
                times.append(float(parts[0]))
                values.append(float(parts[1]))
            except ValueError as err:
                raise TraceFormatError(
                    f"{path}: line {lineno}: non-numeric field ({err})"
                ) from err

    if "sample_rate_hz" in header:
        try:
            rate = float(header["sample_rate_hz"])
        except ValueError as err:
            raise TraceFormatError(f"{path}: malformed sample_rate_hz header") from err
    elif len(times) >= 2:
        dts = np.diff(times)
        dt = float(np.median(dts))
        if dt <= 0:
            raise TraceFormatError(f"{path}: non-increasing time column")
        if np.max(np.abs(dts - dt)) > _JITTER_REL_TOL * dt:
            raise TraceFormatError(
                f"{path}: inconsistent timestep (jitter above {_JITTER_REL_TOL:g} "
                "relative)"
            )
        rate = 1.0 / dt
    else:
        raise TraceFormatError(
            f"{path}: malformed header: no sample_rate_hz and too few rows to "
            "infer the rate"
        )

    unit = Unit(header["unit"]) if "unit" in header else Unit.DIMENSIONLESS
    meta = {k: v for k, v in header.items()
            if k not in ("sample_rate_hz", "unit") and not k.startswith(_HEADER_MAGIC)}
    return SampleTrace(np.asarray(values), rate, unit, meta)


def _write_wav(trace: SampleTrace, path) -> None:
    scaled = np.round(trace.samples * 32768.0)
    n_clipped = int(np.count_nonzero((scaled > 32767) | (scaled < -32768)))
    if n_clipped:
        warnings.warn(
            f"{n_clipped} samples clipped to the PCM16 range", ClippingWarning,
            stacklevel=3,
        )
    codes = np.clip(scaled, -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(int(round(trace.sample_rate_hz)))
        w.writeframes(codes.tobytes())


def _read_wav(path) -> SampleTrace:
    try:
        with wave.open(str(path), "rb") as w:
            if w.getnchannels() != 1:
                raise TraceFormatError(f"{path}: only mono WAV is supported")
            if w.getsampwidth() != 2:
                raise TraceFormatError(f"{path}: only 16-bit PCM WAV is supported")
            if w.getcomptype() != "NONE":
                raise TraceFormatError(
                    f"{path}: unsupported WAV encoding {w.getcomptype()!r}"
                )
            rate = float(w.getframerate())
            frames = w.readframes(w.getnframes())
    except wave.Error as err:
        raise TraceFormatError(f"{path}: {err}") from err
    samples = np.frombuffer(frames, dtype="<i2").astype(float) / 32768.0
    return SampleTrace(samples, rate, Unit.DIMENSIONLESS, {"source": "wav16"})
