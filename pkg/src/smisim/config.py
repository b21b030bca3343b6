"""Run configuration: a strict, sectioned key-value file mapped onto dataclasses.

Format example::

    [scenario]
    kind = slip_burst
    duration_s = 2.0
    seed = 42
    band_lo_hz = 200.0
    band_hi_hz = 1000.0
    rms_m = 1.2e-7
    onset_s = 0.8
    burst_duration_s = 0.6

    [analysis]
    rest_window = 0.2:0.75
    signal_window = 0.85:1.35
    exclusion_windows = 0.0:0.05, 1.9:2.0

Every key must be recognized; unknown keys are rejected so a typo can never
silently fall back to a physics default.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields

from .decision_map import BASELINE_ANL_DB
from .readout import ReadoutConfig
from .scenarios import MicModel, ScenarioKind, ScenarioSpec
from .smi import LaserConfig


class ConfigError(ValueError):
    """The configuration file is malformed or contains unknown keys."""


@dataclass
class AnalysisParams:
    """Windowing and detection parameters for the analysis pipeline."""

    noise_window_s: float = 0.5
    detect_threshold: float = 4.0
    min_duration_s: float = 0.02
    hold_s: float = 0.05
    envelope_s: float = 0.02
    laser_noise_rms_v: float = 0.02
    ambient_anl_db: float = BASELINE_ANL_DB
    rest_window: tuple[float, float] | None = None
    signal_window: tuple[float, float] | None = None
    spectrum_start_s: float = 0.25
    spectrum_len_s: float = 1.0
    exclusion_windows: list[tuple[float, float]] = field(default_factory=list)


@dataclass
class RunConfig:
    laser: LaserConfig = field(default_factory=LaserConfig)
    readout: ReadoutConfig = field(default_factory=ReadoutConfig)
    mic: MicModel = field(default_factory=MicModel)
    scenario: ScenarioSpec = field(default_factory=lambda: ScenarioSpec(
        ScenarioKind.SINUSOID, 0.01,
        {"freq_hz": 500.0, "amplitude_pp_m": 3 * 650e-9}))
    analysis: AnalysisParams = field(default_factory=AnalysisParams)

    @property
    def exclusion_windows(self) -> list[tuple[float, float]]:
        return self.analysis.exclusion_windows


# scenario keys routed into ScenarioSpec.params, per kind
_SCENARIO_PARAM_KEYS = {
    ScenarioKind.SINUSOID: {"freq_hz", "amplitude_pp_m"},
    ScenarioKind.STEPPER: {"steps_per_s", "fundamental_amplitude_m",
                           "harmonic_rolloff_db", "n_harmonics", "offset_m"},
    ScenarioKind.SLIP_BURST: {"band_lo_hz", "band_hi_hz", "rms_m", "onset_s",
                              "burst_duration_s"},
    ScenarioKind.IMPULSE_TRAIN: {"peak_amplitudes_m", "spacing_s", "ring_freq_hz",
                                 "decay_tau_s", "start_s"},
    ScenarioKind.SILENCE: set(),
}
_SCENARIO_COMMON_KEYS = {"kind", "duration_s", "seed", "rate_hz"}


def _parse_scalar(text: str):
    text = text.strip()
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _parse_value(text: str):
    """Typed value: scalar, start:end range pair, or comma-separated list."""
    text = text.strip()
    if "," in text:
        return [_parse_value(part) for part in text.split(",")]
    if ":" in text:
        lo, _, hi = text.partition(":")
        return (float(lo), float(hi))
    return _parse_scalar(text)


def _coerce_section(section: str, items: dict[str, str], cls):
    """Build a dataclass from string items, rejecting unknown keys."""
    known = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, raw in items.items():
        if key not in known:
            raise ConfigError(f"[{section}] unknown key {key!r}")
        value = _parse_value(raw)
        if known[key].type in ("int", int) and isinstance(value, float):
            raise ConfigError(f"[{section}] {key} must be an integer")
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"[{section}] {err}") from err


def _coerce_analysis(items: dict[str, str]) -> AnalysisParams:
    known = {f.name for f in fields(AnalysisParams)}
    kwargs = {}
    for key, raw in items.items():
        if key not in known:
            raise ConfigError(f"[analysis] unknown key {key!r}")
        value = _parse_value(raw)
        if key == "exclusion_windows" and isinstance(value, tuple):
            value = [value]
        kwargs[key] = value
    try:
        return AnalysisParams(**kwargs)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"[analysis] {err}") from err


def _coerce_scenario(items: dict[str, str]) -> ScenarioSpec:
    if "kind" not in items:
        raise ConfigError("[scenario] missing required key 'kind'")
    try:
        kind = ScenarioKind(items["kind"].strip())
    except ValueError as err:
        raise ConfigError(f"[scenario] {err}") from err
    allowed = _SCENARIO_COMMON_KEYS | _SCENARIO_PARAM_KEYS[kind]
    params = {}
    common = {}
    for key, raw in items.items():
        if key == "kind":
            continue
        if key not in allowed:
            raise ConfigError(f"[scenario] unknown key {key!r} for kind {kind.value}")
        value = _parse_value(raw)
        if key in _SCENARIO_COMMON_KEYS:
            common[key] = value
        elif key == "burst_duration_s":
            params["duration_s"] = value
        elif key == "peak_amplitudes_m" and not isinstance(value, list):
            params[key] = [value]
        else:
            params[key] = value
    try:
        return ScenarioSpec(kind=kind, params=params, **common)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"[scenario] {err}") from err


_SECTION_BUILDERS = {
    "laser": lambda items: _coerce_section("laser", items, LaserConfig),
    "readout": lambda items: _coerce_section("readout", items, ReadoutConfig),
    "mic": lambda items: _coerce_section("mic", items, MicModel),
    "scenario": _coerce_scenario,
    "analysis": _coerce_analysis,
}


def loads(text: str) -> RunConfig:
    """Parse configuration text into a RunConfig; unknown sections/keys fail."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keys are case-sensitive
    try:
        parser.read_string(text)
    except configparser.Error as err:
        raise ConfigError(str(err)) from err

    cfg = RunConfig()
    for section in parser.sections():
        if section not in _SECTION_BUILDERS:
            raise ConfigError(f"unknown section [{section}]")
        items = dict(parser.items(section))
        setattr(cfg, section, _SECTION_BUILDERS[section](items))
    return cfg


def load(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as f:
        return loads(f.read())
