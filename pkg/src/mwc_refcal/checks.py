"""Self-check suites: spec validation, assumption validators, CLT and the
time-domain vs frequency-domain oracle equivalence.

These are the executable forms of the modeling assumptions.  Each check
returns a CheckOutcome with a pass flag and a one-line detail string; the
CLI `check` subcommand prints them and exits nonzero on any failure.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .channel import MwcConfig, RecordWindow, alias_spectrum, l_window, simulate_channel
from .harness import ExperimentConfig, cell_seed
from .mixing import draw_chips, fourier_coeffs, phase_uniformity, sampled_line_weights
from .numerics import RngStream
from .refvolt import check_alignment, clt_check
from .signal_model import MultibandSpec, validate_spec

# Defaults mirror the acceptance bounds for the assumption validators.
ALIGNMENT_TRIALS = 500
ALIGNMENT_GAP_PERIODS = 5.0
ALIGNMENT_PASS_FRACTION = 0.90
PHASE_SAMPLES = 10_000
CLT_TRIALS = 10_000
CLT_MEAN_BOUND = 0.1
CLT_VAR_BAND = (0.9, 1.1)
CLT_PROB_TOL = 0.01
ORACLE_SEEDS = 5
ORACLE_REL_L2_TOL = 0.01
ORACLE_Q_VALUES = (1, 3, 5)
ORACLE_N_VALUES = (1, 2)
ORACLE_GRID_REFINE = 8


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    passed: bool
    detail: str


def check_config_valid(config: ExperimentConfig) -> CheckOutcome:
    """validate_spec over every (N, q) cell of the sweep grid."""
    problems = []
    for n_bands in config.n_values:
        spec = config.build_spec(n_bands)
        for q in config.q_values:
            for v in validate_spec(spec, config.fp, q):
                problems.append(f"N={n_bands}, q={q}: {v}")
    if problems:
        return CheckOutcome("config-valid", False, "; ".join(problems[:3]))
    cells = len(config.n_values) * len(config.q_values)
    return CheckOutcome("config-valid", True, f"all {cells} sweep cells valid")


def check_peak_alignment(
    config: ExperimentConfig,
    trials: int = ALIGNMENT_TRIALS,
    q: int | None = None,
) -> CheckOutcome:
    """Output vs input envelope peak times stay within 5 chip periods.

    Runs `trials` independent chip draws on the N = 1 signal at the
    largest q of the sweep grid (unless overridden) and counts trials
    whose gap is at most 5*T_p.
    """
    q = max(config.q_values) if q is None else q
    spec = config.build_spec(1)
    cfg = config.mwc_config(q)
    t_p = 1.0 / config.fp
    seed = cell_seed(config.seed, 1, 1001 + q)
    gaps = np.empty(trials)
    for i in range(trials):
        chips = draw_chips(cfg.n_chips, RngStream(seed, i), cfg.fp)
        gaps[i] = check_alignment(spec, chips, cfg, config.record)
    fraction = float(np.mean(gaps <= ALIGNMENT_GAP_PERIODS * t_p))
    passed = fraction >= ALIGNMENT_PASS_FRACTION
    return CheckOutcome(
        "peak-alignment",
        passed,
        f"gap <= {ALIGNMENT_GAP_PERIODS:g}*T_p in {fraction:.1%} of {trials} "
        f"trials at q={q} (need >= {ALIGNMENT_PASS_FRACTION:.0%})",
    )


def check_phase_uniformity(
    config: ExperimentConfig, n_samples: int = PHASE_SAMPLES
) -> CheckOutcome:
    """Circular resultant of coefficient phases stays below 3/sqrt(n)."""
    q = max(3, max(q for q in config.q_values if q % 2 == 1))
    l1 = l_window(config.carrier_step, q)
    seed = cell_seed(config.seed, 1, 2001)
    windows = []
    total = 0
    trial = 0
    while total < n_samples:
        chips = draw_chips(config.n_chips, RngStream(seed, trial), config.fp)
        window = fourier_coeffs(chips, l1, q)
        if total + q > n_samples:  # trim the last window to exactly n samples
            window = fourier_coeffs(chips, l1, n_samples - total)
        windows.append(window)
        total += len(window.coeffs)
        trial += 1
    resultant = phase_uniformity(windows)
    bound = 3.0 / math.sqrt(n_samples)
    passed = resultant <= bound
    return CheckOutcome(
        "phase-uniformity",
        passed,
        f"resultant {resultant:.2e} over {n_samples} samples "
        f"(bound 3/sqrt(n) = {bound:.2e})",
    )


def check_clt(
    config: ExperimentConfig, trials: int = CLT_TRIALS, q: int = 19
) -> CheckOutcome:
    """Gaussian collapse of the q-term coefficient sum at the design point."""
    l1 = l_window(config.carrier_step, q)
    seed = cell_seed(config.seed, 1, 3001 + q)
    windows = []
    for i in range(trials):
        chips = draw_chips(config.n_chips, RngStream(seed, i), config.fp)
        windows.append(fourier_coeffs(chips, l1, q))
    report = clt_check(
        windows, q, RngStream(seed, trials + 1), p0=config.p0, min_trials=min(trials, 1000)
    )
    gap = abs(report.p_empirical - report.p_gaussian)
    passed = (
        abs(report.mean) <= CLT_MEAN_BOUND
        and CLT_VAR_BAND[0] <= report.variance <= CLT_VAR_BAND[1]
        and gap <= CLT_PROB_TOL
    )
    return CheckOutcome(
        "clt",
        passed,
        f"mean={report.mean:+.3f}, var={report.variance:.3f}, "
        f"|P_emp - P_gauss|={gap:.4f} at p0={report.p0:g}, q={q}, "
        f"{report.n_trials} ensembles",
    )


def oracle_trace(
    spec: MultibandSpec,
    window,
    cfg: MwcConfig,
    record: RecordWindow,
    refine: int = ORACLE_GRID_REFINE,
) -> np.ndarray:
    """Inverse-transform the aliasing-expansion spectrum onto the record grid.

    The spectrum is sampled on a grid `refine` times finer than the
    record's own 1/duration spacing: inverse-transforming samples of a
    continuous spectrum replicates the waveform at the grid's period, and
    the slowly decaying sinc tails alias visibly at period = duration.
    The refined transform covers refine*duration; only the leading record
    is returned.  Spectrum values are scaled by the grid rate and the
    start-time phase ramp to match the DFT convention of the simulated
    record.
    """
    rate = cfg.grid_rate
    n = int(round(record.duration * rate))
    n_fine = n * refine
    freqs = np.fft.fftfreq(n_fine, d=1.0 / rate)
    inband = np.abs(freqs) <= cfg.fs / 2 * (1 + 1e-12)
    spectrum = np.zeros(n_fine, dtype=complex)
    spectrum[inband] = alias_spectrum(spec, window, cfg, freqs[inband])
    spectrum *= rate * np.exp(2j * np.pi * freqs * record.start)
    return np.fft.ifft(spectrum).real[:n]


def oracle_equivalence_cases(config: ExperimentConfig):
    """Yield (n_bands, q, seed_index, relative L2 error) for the oracle suite.

    Records are centered on the pulse (delay = duration/2) so the compared
    interior half of the record carries the pulse energy rather than bare
    sinc tails, where the two routes' finite-record artifacts dominate.
    The expansion window carries the line weights of the sampled chip
    waveform, the object the dense-grid pipeline actually multiplies by.
    """
    record = RecordWindow(0.0, config.record_duration)
    for n_bands in ORACLE_N_VALUES:
        base = config.build_spec(n_bands)
        spec = MultibandSpec(
            tuple(
                dataclasses.replace(c, delay=record.duration / 2)
                for c in base.components
            ),
            base.f_nyq,
        )
        for q in ORACLE_Q_VALUES:
            cfg = config.mwc_config(q)
            l_starts = [
                l_window(round(c.carrier / config.fp), q) for c in spec.components
            ]
            lo = min(l_starts)
            hi = max(l_starts) + q - 1
            for s in range(ORACLE_SEEDS):
                seed = cell_seed(config.seed, n_bands, 4001 + q)
                chips = draw_chips(cfg.n_chips, RngStream(seed, s), cfg.fp)
                out = simulate_channel(spec, chips, cfg, record)
                window = sampled_line_weights(chips, cfg.oversample, lo, hi - lo + 1)
                oracle = oracle_trace(spec, window, cfg, record)
                n = len(oracle)
                mid = slice(n // 4, n // 4 + n // 2)
                diff = np.linalg.norm(out.y_dense.values[mid] - oracle[mid])
                ref = np.linalg.norm(out.y_dense.values[mid])
                yield n_bands, q, s, float(diff / ref)


def check_oracle_equivalence(config: ExperimentConfig) -> CheckOutcome:
    """Time-domain pipeline vs aliasing-expansion oracle within 1% L2."""
    worst = 0.0
    count = 0
    for n_bands, q, s, rel in oracle_equivalence_cases(config):
        worst = max(worst, rel)
        count += 1
    passed = worst <= ORACLE_REL_L2_TOL
    return CheckOutcome(
        "oracle-equivalence",
        passed,
        f"worst relative L2 {worst:.2%} over {count} cases "
        f"(q in {ORACLE_Q_VALUES}, N in {ORACLE_N_VALUES}, "
        f"{ORACLE_SEEDS} seeds; tolerance {ORACLE_REL_L2_TOL:.0%})",
    )


def run_all_checks(
    config: ExperimentConfig,
    alignment_trials: int = ALIGNMENT_TRIALS,
    phase_samples: int = PHASE_SAMPLES,
    clt_trials: int = CLT_TRIALS,
) -> list[CheckOutcome]:
    return [
        check_config_valid(config),
        check_peak_alignment(config, trials=alignment_trials),
        check_phase_uniformity(config, n_samples=phase_samples),
        check_clt(config, trials=clt_trials),
        check_oracle_equivalence(config),
    ]
