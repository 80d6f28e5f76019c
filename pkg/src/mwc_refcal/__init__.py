"""Sampling-stage simulation and quantizer reference-voltage calibration
for the modulated wideband converter."""

from .numerics import (
    InvalidInput,
    RngStream,
    SampleTrace,
    analytic_signal,
    brickwall_lowpass,
    empirical_quantile,
    normal_quantile,
)
from .signal_model import (
    BandComponent,
    MultibandSpec,
    analytic_spectrum,
    envelope,
    synthesize,
    validate_spec,
)
from .mixing import (
    ChipSequence,
    FourierCoeffWindow,
    d_factor,
    draw_chips,
    fourier_coeffs,
    phase_uniformity,
    sigma_hat,
)
from .channel import (
    ChannelOutput,
    MwcConfig,
    RecordWindow,
    alias_spectrum,
    channel_peak,
    full_system,
    l_window,
    mix,
    simulate_channel,
)
from .refvolt import (
    CltReport,
    RefVoltEstimate,
    check_alignment,
    clt_check,
    mc_refvolt,
    predict_multiband,
    predict_refvolt,
)
from .harness import (
    ExperimentConfig,
    SweepResult,
    SweepRow,
    cell_seed,
    load_config,
    mean_ratio,
    run_cell,
    run_sweep,
    sweep_summary,
    write_sweep_csv,
    write_sweep_json,
)

__version__ = "0.1.0"
