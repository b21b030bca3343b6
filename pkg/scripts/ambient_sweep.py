#!/usr/bin/env python3
"""Sweep the ambient noise level and compare laser vs microphone SNR.

Reproduces the ambient-resilience experiment on the synthetic contact
scenario: the laser channel is unaffected by ambient noise while the
microphone SNR falls, so the winning modality flips as the room gets louder.
"""
import argparse

import numpy as np

from smisim import (
    ExperimentRecord,
    LaserConfig,
    MicModel,
    ReadoutConfig,
    classify,
    gen_slip_burst,
    laser_channel,
    mic_channel,
    snr_db,
    worst_case_noise,
)
from smisim.readout import resample_trace

SEED = 11


def channel_snr(trace, rest_s=(0.2, 0.75), signal_s=(0.85, 1.35)):
    rate = trace.sample_rate_hz
    rest = (int(rest_s[0] * rate), int(rest_s[1] * rate))
    signal = (int(signal_s[0] * rate), int(signal_s[1] * rate))
    noise = worst_case_noise(trace, rest, int(0.5 * rate))
    return snr_db(trace, signal, noise).snr_db


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rms-m", type=float, default=1.2e-7,
                        help="burst RMS displacement at the fingertip")
    parser.add_argument("--anl", type=float, nargs="+",
                        default=[57.0, 62.0, 67.0, 72.0, 77.0, 82.0])
    args = parser.parse_args()

    vib = gen_slip_burst(200.0, 1000.0, args.rms_m, onset_s=0.8,
                         duration_s=0.6, total_s=2.0, seed=SEED)
    cfg = ReadoutConfig()
    laser_trace = laser_channel(vib, LaserConfig(), cfg, noise_rms_v=0.02,
                                seed=SEED)
    laser_snr = channel_snr(laser_trace)
    vib_adc = resample_trace(vib, cfg.adc_rate_hz)

    print(f"{'ANL dB':>7} {'laser dB':>9} {'mic dB':>8} {'diff dB':>8}  winner")
    for anl in args.anl:
        mic_trace = mic_channel(vib_adc, anl, MicModel(), seed=SEED)
        mic_snr = channel_snr(mic_trace)
        rec = ExperimentRecord(f"sweep_{anl:.0f}", anl, mic_snr, laser_snr,
                               mic_snr - laser_snr)
        winner, tie = classify(rec)
        label = "tie" if tie else winner.value
        print(f"{anl:7.1f} {laser_snr:9.2f} {mic_snr:8.2f} "
              f"{rec.diff_db:8.2f}  {label}")


if __name__ == "__main__":
    main()
