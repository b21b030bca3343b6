"""smisim: self-mixing interferometry fingertip simulator and analysis toolkit."""

from .analysis import (
    Event,
    EventKind,
    EventList,
    NoiseEstimate,
    NoisePolicy,
    SnrMethod,
    SnrReport,
    SpectrumReport,
    detect_events,
    noise_floor,
    normalize,
    peak_snr,
    snr_db,
    spectrum,
    worst_case_noise,
)
from .config import AnalysisParams, ConfigError, RunConfig
from .decision_map import (
    PAPER_EXPERIMENTS,
    DecisionMapData,
    ExperimentRecord,
    MapPoint,
    Winner,
    build_map,
    classify,
    emit_map,
    parse_map_csv,
)
from .readout import (
    BiquadCoeffs,
    ReadoutConfig,
    apply_chain,
    apply_filter,
    design_highpass,
    design_sallen_key_lowpass,
    frequency_response,
    quantize,
    resample_trace,
)
from .scenarios import (
    MicModel,
    ScenarioKind,
    ScenarioSpec,
    gen_impulse_train,
    gen_sinusoid,
    gen_slip_burst,
    gen_stepper,
    laser_channel,
    mic_channel,
    render_scenario,
)
from .smi import (
    ConvergenceError,
    FringeDetectorParams,
    FringeReport,
    LaserConfig,
    count_fringes,
    displacement_from_fringes,
    simulate_smi,
    smi_photocurrent,
    solve_excess_phase,
)
from .trace import SampleTrace, Unit
from .traceio import TraceFormatError, read_trace, write_trace

__version__ = "0.1.0"
