"""Reference-voltage estimation: Monte Carlo over chip draws and the
closed-form sqrt(N*q) law, plus executable validators for the two
assumptions behind the closed form (peak-time alignment and coefficient
phase behavior through the central limit theorem).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import (
    MwcConfig,
    RecordWindow,
    channel_peak,
    l_window,
    simulate_channel,
)
from .mixing import ChipSequence, draw_chips, fourier_coeffs, sigma_hat
from .numerics import InvalidInput, RngStream, empirical_quantile, normal_quantile
from .signal_model import MultibandSpec, envelope, synthesize_cached, validate_spec


@dataclass(frozen=True)
class RefVoltEstimate:
    """Monte Carlo threshold estimate for one (signal, q) cell.

    maxima holds one interior envelope peak per trial; y_th is their
    order-statistic p0-quantile; prediction is the closed-form
    sqrt(N*q) * env_single * sigma * normal_quantile(p0) with sigma pooled
    from the same trial ensemble.  env_max/t0 describe the fixed input
    envelope; degenerate flags an all-zero maxima ensemble.
    """

    trials: int
    p0: float
    maxima: np.ndarray
    y_th: float
    prediction: float
    env_max: float
    sigma: float
    q: int
    n_bands: int
    t0: float
    seed: int
    degenerate: bool


def predict_refvolt(q: int, env_max: float, sigma: float, p0: float) -> float:
    """Closed-form threshold sqrt(q) * env_max * sigma * normal_quantile(p0)."""
    if q < 1 or q % 2 == 0:
        raise InvalidInput(f"q must be a positive odd integer, got {q}")
    if env_max < 0 or sigma < 0:
        raise InvalidInput("env_max and sigma must be non-negative")
    return math.sqrt(q) * env_max * sigma * normal_quantile(p0)


def predict_multiband(
    n_bands: int, q: int, env_max_single: float, sigma: float, p0: float
) -> float:
    """sqrt(N) extension of the closed form for N equal, peak-aligned bands.

    Assumes every component reaches the same single-band envelope maximum
    at a common time (the worst case for the threshold).
    """
    if n_bands < 1:
        raise InvalidInput("n_bands must be >= 1")
    return math.sqrt(n_bands) * predict_refvolt(q, env_max_single, sigma, p0)


def _component_windows(spec: MultibandSpec, cfg: MwcConfig) -> list[tuple[int, int]]:
    """(l1, count) coefficient window per component."""
    windows = []
    for comp in spec.components:
        l0 = round(comp.carrier / cfg.fp)
        windows.append((l_window(l0, cfg.q), cfg.q))
    return windows


def mc_refvolt(
    spec: MultibandSpec,
    cfg: MwcConfig,
    trials: int,
    p0: float,
    seed: int,
    record: RecordWindow = RecordWindow(),
) -> RefVoltEstimate:
    """Monte Carlo threshold over random chip draws with a fixed input.

    Trial i draws chips from stream (seed, i) and records the interior
    envelope peak of the filtered channel output; the signal itself never
    changes between trials.  Fewer than ~1/(1-p0) trials make the quantile
    a coarse order statistic but are accepted (a single trial degenerates
    to its own maximum).
    """
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    violations = validate_spec(spec, cfg.fp, cfg.q)
    if violations:
        raise InvalidInput("invalid spec: " + "; ".join(violations))
    windows = _component_windows(spec, cfg)

    maxima = np.empty(trials)
    coeff_windows = []
    for i in range(trials):
        chips = draw_chips(cfg.n_chips, RngStream(seed, i), cfg.fp)
        maxima[i] = channel_peak(spec, chips, cfg, record)
        for l1, count in windows:
            coeff_windows.append(fourier_coeffs(chips, l1, count))

    y_th = empirical_quantile(maxima, p0)
    x = synthesize_cached(spec, record.start, record.duration, cfg.grid_rate)
    env, t0 = envelope(x)
    env_max = float(env.values.max())

    single = MultibandSpec((spec.components[0],), spec.f_nyq)
    env_single, _ = envelope(
        synthesize_cached(single, record.start, record.duration, cfg.grid_rate)
    )
    env_max_single = float(env_single.values.max())

    pooled = sum(len(w.coeffs) for w in coeff_windows)
    sigma = sigma_hat(coeff_windows) if pooled >= 2 else float("nan")
    prediction = (
        predict_multiband(spec.n_bands, cfg.q, env_max_single, sigma, p0)
        if math.isfinite(sigma)
        else float("nan")
    )
    return RefVoltEstimate(
        trials=trials,
        p0=p0,
        maxima=maxima,
        y_th=y_th,
        prediction=prediction,
        env_max=env_max,
        sigma=sigma,
        q=cfg.q,
        n_bands=spec.n_bands,
        t0=t0,
        seed=seed,
        degenerate=bool(np.all(maxima == 0.0)),
    )


def check_alignment(
    spec: MultibandSpec,
    chips: ChipSequence,
    cfg: MwcConfig,
    record: RecordWindow = RecordWindow(),
    validate: bool = True,
) -> float:
    """Gap between the output peak time and the input envelope peak time.

    Validates the alignment assumption: mixing and ideal filtering should
    not move the instant of the envelope maximum.  A zero signal gives a
    gap of 0 by convention (both argmaxes degenerate to the record start).
    """
    out = simulate_channel(spec, chips, cfg, record, validate=validate)
    x = synthesize_cached(spec, record.start, record.duration, cfg.grid_rate)
    env, t0 = envelope(x)
    if out.peak == 0.0 and env.values.max() == 0.0:
        return 0.0
    return abs(out.peak_time - t0)


@dataclass(frozen=True)
class CltReport:
    """Standardized-moment report for Z = sum z_l / (sigma*sqrt(q)).

    z_l pairs the drawn coefficient magnitudes |c_l| with synthetic
    uniform phases (the phase-uniformity assumption is validated
    separately); curve rows are (threshold, empirical, gaussian)
    probabilities for P{|sum z_l| <= threshold}.
    """

    n_trials: int
    q: int
    mean: float
    variance: float
    sigma: float
    p0: float
    threshold: float
    p_empirical: float
    p_gaussian: float
    curve: tuple[tuple[float, float, float], ...]


CLT_CURVE_PROBS = (0.5, 0.8, 0.9, 0.95, 0.99, 0.995)


def clt_check(
    ensemble,
    q: int,
    rng: RngStream,
    p0: float = 0.99,
    min_trials: int = 1000,
) -> CltReport:
    """Empirical check of the Gaussian collapse of the q-term coefficient sum.

    Each ensemble entry is one trial's q-coefficient window.  Per trial,
    z_l = |c_l|*cos(theta_l) with theta_l drawn uniform on [-pi, pi); the
    report compares the distribution of sum(z_l) against the normal law
    the closed-form threshold relies on.  For q = 1 the report is still
    produced (there is no limit theorem to invoke; the numbers just show
    how far a single term is from Gaussian).
    """
    windows = list(ensemble)
    if len(windows) < min_trials:
        raise InvalidInput(
            f"clt_check needs at least {min_trials} ensembles, got {len(windows)}"
        )
    mags = np.empty((len(windows), q))
    for i, w in enumerate(windows):
        if len(w.coeffs) != q:
            raise InvalidInput(f"ensemble window {i} does not hold q={q} coefficients")
        mags[i] = np.abs(w.coeffs)
    theta = rng.generator().uniform(-np.pi, np.pi, size=mags.shape)
    z = mags * np.cos(theta)
    sigma = float(np.std(z, ddof=1))
    sums = z.sum(axis=1)
    scale = sigma * math.sqrt(q)
    standardized = sums / scale
    threshold = scale * normal_quantile(p0)
    curve = tuple(
        (
            scale * normal_quantile(p),
            float(np.mean(np.abs(sums) <= scale * normal_quantile(p))),
            p,
        )
        for p in CLT_CURVE_PROBS
    )
    return CltReport(
        n_trials=len(windows),
        q=q,
        mean=float(np.mean(standardized)),
        variance=float(np.var(standardized, ddof=1)),
        sigma=sigma,
        p0=p0,
        threshold=threshold,
        p_empirical=float(np.mean(np.abs(sums) <= threshold)),
        p_gaussian=p0,
        curve=curve,
    )
