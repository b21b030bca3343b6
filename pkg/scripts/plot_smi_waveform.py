#!/usr/bin/env python3
"""Plot a simulated SMI photocurrent under sinusoidal target motion.

Shows the displacement, the photocurrent with its per-half-wavelength fringes,
and the detected fringe positions.
"""
import argparse

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from smisim import LaserConfig, count_fringes, gen_sinusoid, simulate_smi


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pp-wavelengths", type=float, default=4.0,
                        help="peak-to-peak displacement in wavelengths")
    parser.add_argument("--freq-hz", type=float, default=500.0)
    parser.add_argument("--out", default="smi_waveform.png")
    args = parser.parse_args()

    laser = LaserConfig()
    pp = args.pp_wavelengths * laser.wavelength_m
    disp = gen_sinusoid(args.freq_hz, pp, 2.0 / args.freq_hz)
    current = simulate_smi(disp, laser)
    report = count_fringes(current, (0, len(current)))

    t_ms = disp.times() * 1e3
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(9, 5), sharex=True)
    ax1.plot(t_ms, disp.samples * 1e6, "C0")
    ax1.set_ylabel("displacement (um)")
    ax1.grid(alpha=0.3)

    ax2.plot(t_ms, current.samples * 1e6, "C1", lw=0.9)
    idx = np.asarray(report.fringe_indices, dtype=int)
    ax2.plot(t_ms[idx], current.samples[idx] * 1e6, "k.", ms=5,
             label=f"{report.fringe_count} fringes")
    ax2.set_xlabel("time (ms)")
    ax2.set_ylabel("photocurrent (uA)")
    ax2.legend(loc="upper right")
    ax2.grid(alpha=0.3)

    fig.suptitle(f"SMI signal, {args.pp_wavelengths:g} wavelengths pp "
                 f"at {args.freq_hz:g} Hz")
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out} ({report.fringe_count} fringes detected)")


if __name__ == "__main__":
    main()
