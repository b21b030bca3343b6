"""Self-mixing interferometry model: excess phase, photocurrent, fringe counting.

The laser-to-target distance sets the round-trip phase phi_0 = 4*pi*D/lambda.
Optical feedback perturbs it to the emitted phase phi_F through

    phi_F + C * sin(phi_F + arctan(alpha)) = phi_0

and the photodiode current follows the emitted power,

    I_PD = dc_power * (1 + mod_depth * cos(phi_F)).

Each lambda/2 of target travel advances phi_0 by 2*pi and produces one fringe.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .trace import SampleTrace, Unit, check_window


class ConvergenceError(RuntimeError):
    """Excess-phase iteration failed to reach tolerance; invalid configuration."""

    def __init__(self, message: str, sample_index: int | None = None):
        super().__init__(message)
        self.sample_index = sample_index


@dataclass
class LaserConfig:
    """Laser and feedback parameters of the self-mixing model.

    The weak-feedback regime (feedback_c < 1) guarantees a unique, hysteresis
    free phase solution. The model parameter defaults are typical literature
    values, not measured ones; see the project README.
    """

    wavelength_m: float = 650e-9
    feedback_c: float = 0.5
    alpha: float = 4.6
    mod_depth: float = 0.1
    dc_power: float = 20e-6

    def __post_init__(self) -> None:
        if self.wavelength_m <= 0:
            raise ValueError(f"wavelength_m must be > 0, got {self.wavelength_m}")
        if not 0 <= self.feedback_c < 1:
            raise ValueError(f"feedback_c must be in [0, 1), got {self.feedback_c}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if not 0 < self.mod_depth <= 1:
            raise ValueError(f"mod_depth must be in (0, 1], got {self.mod_depth}")
        if self.dc_power <= 0:
            raise ValueError(f"dc_power must be > 0, got {self.dc_power}")


@dataclass
class FringeDetectorParams:
    """Fringe counter tuning.

    hysteresis: band half-width as a fraction of half the robust signal span.
    min_separation: debounce interval in samples between band entries.
    """

    hysteresis: float = 0.5
    min_separation: int = 3

    def __post_init__(self) -> None:
        if not 0 < self.hysteresis < 1:
            raise ValueError(f"hysteresis must be in (0, 1), got {self.hysteresis}")
        if self.min_separation < 1:
            raise ValueError("min_separation must be >= 1")


@dataclass
class FringeReport:
    """Detected fringe transitions inside a half-open [start, stop) window."""

    fringe_indices: list[int]
    window: tuple[int, int]

    def __post_init__(self) -> None:
        start, stop = self.window
        if any(b <= a for a, b in zip(self.fringe_indices, self.fringe_indices[1:])):
            raise ValueError("fringe_indices must be strictly increasing")
        if self.fringe_indices and not (
            start <= self.fringe_indices[0] and self.fringe_indices[-1] < stop
        ):
            raise ValueError("fringe_indices must lie inside the window")

    @property
    def fringe_count(self) -> int:
        return len(self.fringe_indices)


_MAX_ITER = 80


def _solve_phase_array(
    phi0: np.ndarray, c: float, alpha: float, tol: float = 1e-12
) -> np.ndarray:
    """Safeguarded Newton on the bracket [phi0 - C, phi0 + C].

    The residual f(x) = x + C*sin(x + arctan alpha) - phi0 is strictly
    increasing for C < 1, so the bracket always contains the unique root and
    bisection can take over whenever a Newton step leaves it.
    """
    if c == 0.0:
        return phi0.copy()
    ata = float(np.arctan(alpha))
    lo = phi0 - c
    hi = phi0 + c
    x = phi0.copy()
    resid = x + c * np.sin(x + ata) - phi0
    for _ in range(_MAX_ITER):
        if np.max(np.abs(resid)) < tol:
            return x
        step = resid / (1.0 + c * np.cos(x + ata))
        x_new = x - step
        escaped = (x_new < lo) | (x_new > hi)
        x = np.where(escaped, 0.5 * (lo + hi), x_new)
        resid = x + c * np.sin(x + ata) - phi0
        lo = np.where(resid < 0, x, lo)
        hi = np.where(resid >= 0, x, hi)
    if np.max(np.abs(resid)) >= tol:
        worst = int(np.argmax(np.abs(resid)))
        raise ConvergenceError(
            f"excess-phase solver stalled at residual {np.abs(resid[worst]):.3e} "
            f"(sample {worst}, C={c}, alpha={alpha})",
            sample_index=worst,
        )
    return x


def solve_excess_phase(phi0: float, laser: LaserConfig, tol: float = 1e-12) -> float:
    """Solve phi_F + C*sin(phi_F + arctan alpha) = phi_0 for phi_F.

    Requires the weak-feedback regime C < 1 (enforced by LaserConfig), which
    makes the root unique. The returned phase satisfies the equation to within
    ``tol`` residual.
    """
    out = _solve_phase_array(np.asarray([phi0], dtype=float), laser.feedback_c,
                             laser.alpha, tol)
    return float(out[0])


def smi_photocurrent(phase, laser: LaserConfig):
    """Photodiode current dc_power * (1 + mod_depth * cos(phase)), in amps."""
    return laser.dc_power * (1.0 + laser.mod_depth * np.cos(phase))


def simulate_smi(displacement: SampleTrace, laser: LaserConfig) -> SampleTrace:
    """Map a displacement trace (meters) to the SMI photocurrent trace (amps).

    phi_0(t) = 4*pi*D(t)/lambda, so lambda/2 of travel sweeps phi_0 by 2*pi
    and yields one fringe. For feedback_c = 0 the closed form
    dc * (1 + m*cos(phi_0)) is used directly (no solver involved).
    """
    if displacement.unit is not Unit.METERS:
        raise ValueError(f"displacement must be in meters, got {displacement.unit}")
    phi0 = 4.0 * np.pi * displacement.samples / laser.wavelength_m
    if laser.feedback_c == 0.0:
        current = smi_photocurrent(phi0, laser)
    else:
        try:
            phi_f = _solve_phase_array(phi0, laser.feedback_c, laser.alpha)
        except ConvergenceError as err:
            raise ConvergenceError(
                f"simulate_smi failed at sample {err.sample_index}: {err}",
                sample_index=err.sample_index,
            ) from err
        current = smi_photocurrent(phi_f, laser)
    return displacement.with_samples(current, unit=Unit.AMPS)


def count_fringes(
    signal: SampleTrace,
    window: tuple[int, int],
    detector: FringeDetectorParams | None = None,
) -> FringeReport:
    """Count fringe cycles in a window via hysteresis (Schmitt) band crossings.

    A fringe sweeps the interference term through a full cycle, so the signal
    alternates between a high and a low band once per fringe regardless of how
    fast the target moves at that instant. Two band alternations make one
    fringe; its reported index is the steepest first-difference sample within
    that cycle. Deterministic for fixed parameters.
    """
    params = detector or FringeDetectorParams()
    start, stop = check_window(window, len(signal), min_len=3)
    x = signal.samples[start:stop]

    lo_p, hi_p = np.percentile(x, [5.0, 95.0])
    span = hi_p - lo_p
    if span <= 0 or span < 1e-12 * max(1.0, abs(float(np.median(x)))):
        return FringeReport([], (start, stop))  # flat signal: no fringes

    mid = 0.5 * (lo_p + hi_p)
    half_band = params.hysteresis * span / 2.0
    hi_enter = x >= mid + half_band
    lo_enter = x <= mid - half_band

    alternations: list[int] = []
    state = 0
    last = -params.min_separation
    for i in range(x.size):
        if hi_enter[i] and state != 1 and i - last >= params.min_separation:
            state = 1
            alternations.append(i)
            last = i
        elif lo_enter[i] and state != -1 and i - last >= params.min_separation:
            state = -1
            alternations.append(i)
            last = i

    n_fringes = (len(alternations) - 1) // 2 if len(alternations) >= 2 else 0
    d = np.abs(np.diff(x))
    indices: list[int] = []
    for j in range(n_fringes):
        a, b = alternations[2 * j], alternations[2 * j + 2]
        peak = int(np.argmax(d[a:b])) + a
        if indices and peak <= indices[-1] - start:
            peak = indices[-1] - start + 1  # keep strictly increasing on plateaus
        indices.append(start + peak)
    return FringeReport(indices, (start, stop))


def displacement_from_fringes(fringe_count: int, laser: LaserConfig) -> float:
    """Travel in meters from a fringe count: one fringe per lambda/2."""
    if fringe_count < 0:
        raise ValueError(f"fringe_count must be >= 0, got {fringe_count}")
    return fringe_count * laser.wavelength_m / 2.0
