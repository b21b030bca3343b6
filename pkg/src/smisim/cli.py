"""Command-line pipeline driver.

Subcommands::

    smisim simulate     --config cfg.ini [--out DIR]   trace files per channel
    smisim analyze      --config cfg.ini [--out DIR]   SNR reports + events
    smisim spectrum     --config cfg.ini [--out DIR]   normalized spectrum CSV
    smisim fringes      --config cfg.ini [--out DIR]   fringe count report
    smisim decision_map [--out DIR]                    decision map CSV + SVG
    smisim validate     [--config cfg.ini] [--out DIR] end-to-end self checks

Exit codes: 0 success, 1 failed assertion, 2 usage/config error, 3 I/O error.
Every run prints one JSON record to stdout; artifacts are deterministic for a
fixed config and seed (no timestamps are embedded).
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import analysis, decision_map
from .config import AnalysisParams, ConfigError, RunConfig, load
from .readout import resample_trace
from .scenarios import (
    ScenarioSpec,
    gen_sinusoid,
    gen_stepper,
    laser_channel,
    mic_channel,
    render_scenario,
)
from .smi import count_fringes, displacement_from_fringes, simulate_smi
from .trace import SampleTrace
from .traceio import TraceFormatError, write_trace

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_USAGE = 2
EXIT_IO = 3


class ValidationFailure(AssertionError):
    """An end-to-end check did not meet its expected value."""

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.details = details or {}


def _out_dir(args) -> str:
    out = args.out or os.environ.get("SMISIM_OUT") or "smisim-out"
    os.makedirs(out, exist_ok=True)
    return out


def _window_indices(window_s: tuple[float, float] | None, trace: SampleTrace,
                    what: str) -> tuple[int, int]:
    if window_s is None:
        raise ConfigError(f"[analysis] {what} is required for this subcommand")
    start = int(round(window_s[0] * trace.sample_rate_hz))
    stop = int(round(window_s[1] * trace.sample_rate_hz))
    return start, stop


def _simulate_channels(cfg: RunConfig):
    """Displacement plus both sensor channels at the ADC rate."""
    disp = render_scenario(cfg.scenario)
    laser = laser_channel(disp, cfg.laser, cfg.readout,
                          noise_rms_v=cfg.analysis.laser_noise_rms_v,
                          seed=cfg.scenario.seed)
    vib_adc = resample_trace(disp, cfg.readout.adc_rate_hz)
    mic = mic_channel(vib_adc, cfg.analysis.ambient_anl_db, cfg.mic,
                      seed=cfg.scenario.seed)
    return disp, laser, mic


def _channel_snr(trace: SampleTrace, params: AnalysisParams) -> dict:
    rest = _window_indices(params.rest_window, trace, "rest_window")
    signal = _window_indices(params.signal_window, trace, "signal_window")
    exclusions = [
        (int(round(a * trace.sample_rate_hz)), int(round(b * trace.sample_rate_hz)))
        for a, b in params.exclusion_windows
    ]
    window_len = max(2, int(round(params.noise_window_s * trace.sample_rate_hz)))
    window_len = min(window_len, rest[1] - rest[0])
    noise = analysis.worst_case_noise(trace, rest, window_len, exclusions)
    report = analysis.snr_db(trace, signal, noise)
    normalized = analysis.normalize(trace, noise)
    events = analysis.detect_events(normalized, params.detect_threshold,
                                    params.min_duration_s, params.hold_s,
                                    params.envelope_s)
    return {
        "snr_db": report.snr_db,
        "p_signal": report.p_signal,
        "p_noise": report.p_noise,
        "signal_window": list(report.signal_window),
        "noise_window": list(report.noise_window),
        "method": report.method.value,
        "n_events": len(events),
        "events": [[e.start, e.end, e.peak_normalized_amplitude]
                   for e in events.events],
    }


def _laser_defaults_note(cfg: RunConfig) -> dict:
    # the simulation model parameters are implementer defaults, not measured
    return {
        "feedback_c": cfg.laser.feedback_c,
        "alpha": cfg.laser.alpha,
        "mod_depth": cfg.laser.mod_depth,
        "defaults_note": "feedback_c/alpha/mod_depth are model defaults unless "
                         "overridden in [laser]",
    }


def cmd_simulate(cfg: RunConfig, args) -> dict:
    out = _out_dir(args)
    disp, laser, mic = _simulate_channels(cfg)
    paths = {}
    for name, trace in (("displacement", disp), ("laser", laser), ("mic", mic)):
        path = os.path.join(out, f"{name}.csv")
        write_trace(trace, path, "csv")
        paths[name] = path
    return {"status": "ok", "artifacts": paths, "laser_model": _laser_defaults_note(cfg)}


def cmd_analyze(cfg: RunConfig, args) -> dict:
    out = _out_dir(args)
    _, laser, mic = _simulate_channels(cfg)
    result = {
        "status": "ok",
        "channels": {
            "laser": _channel_snr(laser, cfg.analysis),
            "mic": _channel_snr(mic, cfg.analysis),
        },
        "ambient_anl_db": cfg.analysis.ambient_anl_db,
    }
    path = os.path.join(out, "analyze.json")
    with open(path, "w", encoding="utf-8") as f:
        json.dump(result, f, indent=2, sort_keys=True)
        f.write("\n")
    result["artifacts"] = {"analyze": path}
    return result


def _write_spectrum_csv(report: analysis.SpectrumReport, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("freq_hz,normalized_magnitude\n")
        for fr, mag in zip(report.freqs_hz, report.normalized_magnitudes):
            f.write(f"{fr!r},{mag!r}\n")


def cmd_spectrum(cfg: RunConfig, args) -> dict:
    out = _out_dir(args)
    disp, laser, mic = _simulate_channels(cfg)
    trace = {"laser": laser, "mic": mic, "displacement": disp}[args.channel]
    report = analysis.spectrum(trace, cfg.analysis.spectrum_start_s,
                               cfg.analysis.spectrum_len_s)
    path = os.path.join(out, f"spectrum_{args.channel}.csv")
    _write_spectrum_csv(report, path)
    summary = {
        "status": "ok",
        "channel": args.channel,
        "degenerate": report.degenerate,
        "artifacts": {"spectrum": path},
    }
    if not report.degenerate:
        summary["peak_freq_hz"] = report.peak_freq_hz
    return summary


def cmd_fringes(cfg: RunConfig, args) -> dict:
    out = _out_dir(args)
    disp = render_scenario(cfg.scenario)
    current = simulate_smi(disp, cfg.laser)
    if cfg.analysis.signal_window is not None:
        window = _window_indices(cfg.analysis.signal_window, current, "signal_window")
    else:
        window = (0, len(current))
    report = count_fringes(current, window)
    travel = displacement_from_fringes(report.fringe_count, cfg.laser)
    result = {
        "status": "ok",
        "fringe_count": report.fringe_count,
        "fringe_indices": list(report.fringe_indices),
        "window": list(report.window),
        "travel_m": travel,
    }
    path = os.path.join(out, "fringes.json")
    with open(path, "w", encoding="utf-8") as f:
        json.dump(result, f, indent=2, sort_keys=True)
        f.write("\n")
    result["artifacts"] = {"fringes": path}
    return result


def cmd_decision_map(cfg: RunConfig, args) -> dict:
    out = _out_dir(args)
    data = decision_map.build_map(list(decision_map.PAPER_EXPERIMENTS))
    csv_path = os.path.join(out, "decision_map.csv")
    svg_path = os.path.join(out, "decision_map.svg")
    with open(csv_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(decision_map.emit_map_csv(data))
    with open(svg_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(decision_map.emit_map_svg(data))
    return {
        "status": "ok",
        "points": [[p.name, p.winner.value, p.diff_db] for p in data.points],
        "artifacts": {"csv": csv_path, "svg": svg_path},
    }


def _check(checks: list, name: str, ok: bool, detail) -> None:
    checks.append({"check": name, "ok": bool(ok), "detail": detail})


def cmd_validate(cfg: RunConfig, args) -> dict:
    """Rebuild the two bench validations: interferometry and vibrometry."""
    out = _out_dir(args)
    checks: list[dict] = []
    rate = cfg.scenario.rate_hz
    artifacts = {}

    # interferometry: a 500 Hz speaker tone, fringe count per half period
    for pp_mult, expected in ((3, 6), (4, 8)):
        pp = pp_mult * cfg.laser.wavelength_m
        disp = gen_sinusoid(500.0, pp, 2 / 500.0, rate, cfg.scenario.seed)
        current = simulate_smi(disp, cfg.laser)
        period = int(round(rate / 500.0))
        window = (period // 4, period // 4 + period // 2)
        report = count_fringes(current, window)
        travel = displacement_from_fringes(report.fringe_count, cfg.laser)
        _check(checks, f"speaker_{pp_mult}lam_fringes",
               report.fringe_count == expected,
               {"count": report.fringe_count, "expected": expected})
        if pp_mult == 3:
            _check(checks, "speaker_3lam_travel", travel == 1.95e-6,
                   {"travel_m": travel, "expected_m": 1.95e-6})
            path = os.path.join(out, "speaker_smi.csv")
            write_trace(current, path, "csv")
            artifacts["speaker_smi"] = path

    # vibrometry: stepper drive, spectral peak at the driving rate
    for steps in (500.0, 1000.0):
        disp = gen_stepper(steps, 50e-9, duration_s=1.5, rate_hz=rate,
                           seed=cfg.scenario.seed)
        volts = laser_channel(disp, cfg.laser, cfg.readout,
                              noise_rms_v=cfg.analysis.laser_noise_rms_v,
                              seed=cfg.scenario.seed)
        report = analysis.spectrum(volts, cfg.analysis.spectrum_start_s,
                                   cfg.analysis.spectrum_len_s)
        df = 1.0 / cfg.analysis.spectrum_len_s
        peak = report.peak_freq_hz
        _check(checks, f"stepper_{int(steps)}_peak", abs(peak - steps) <= df,
               {"peak_hz": peak, "expected_hz": steps, "bin_hz": df})
        spath = os.path.join(out, f"stepper_{int(steps)}_spectrum.csv")
        _write_spectrum_csv(report, spath)
        tpath = os.path.join(out, f"stepper_{int(steps)}.csv")
        write_trace(volts, tpath, "csv")
        artifacts[f"stepper_{int(steps)}_spectrum"] = spath
        artifacts[f"stepper_{int(steps)}"] = tpath

    result = {
        "status": "ok" if all(c["ok"] for c in checks) else "failed",
        "checks": checks,
        # basenames only, so reruns into different directories stay byte-identical
        "artifacts": {k: os.path.basename(v) for k, v in artifacts.items()},
        "laser_model": _laser_defaults_note(cfg),
    }
    path = os.path.join(out, "validation.json")
    with open(path, "w", encoding="utf-8") as f:
        json.dump(result, f, indent=2, sort_keys=True)
        f.write("\n")
    if result["status"] != "ok":
        failed = [c["check"] for c in checks if not c["ok"]]
        raise ValidationFailure(f"validation checks failed: {failed}", result)
    artifacts["validation"] = path
    result["artifacts"] = artifacts
    return result


_COMMANDS = {
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "spectrum": cmd_spectrum,
    "fringes": cmd_fringes,
    "decision_map": cmd_decision_map,
    "validate": cmd_validate,
}
_NEEDS_CONFIG = {"simulate", "analyze", "spectrum", "fringes"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smisim",
        description="Self-mixing interferometry fingertip simulator and analyzer",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="run configuration file")
        p.add_argument("--out", help="output directory (default $SMISIM_OUT)")
        if name == "spectrum":
            p.add_argument("--channel", choices=("laser", "mic", "displacement"),
                           default="laser")
        if name == "validate":
            p.add_argument("--seed", type=int, help="override the scenario seed")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    try:
        if args.config:
            cfg = load(args.config)
        elif args.command in _NEEDS_CONFIG:
            raise ConfigError(f"{args.command} requires --config")
        else:
            cfg = RunConfig()
        if getattr(args, "seed", None) is not None:
            cfg.scenario = ScenarioSpec(cfg.scenario.kind, cfg.scenario.duration_s,
                                        cfg.scenario.params, args.seed,
                                        cfg.scenario.rate_hz)
        result = _COMMANDS[args.command](cfg, args)
    except ConfigError as err:
        _emit({"status": "error", "kind": "config", "message": str(err)})
        return EXIT_USAGE
    except ValidationFailure as err:
        _emit({"status": "error", "kind": "assertion", "message": str(err),
               "details": err.details})
        return EXIT_ASSERTION
    except (TraceFormatError, OSError) as err:
        _emit({"status": "error", "kind": "io", "message": str(err)})
        return EXIT_IO
    except ValueError as err:
        _emit({"status": "error", "kind": "config", "message": str(err)})
        return EXIT_USAGE

    _emit(result)
    return EXIT_OK


def _emit(record: dict) -> None:
    json.dump(record, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")


if __name__ == "__main__":
    sys.exit(main())
