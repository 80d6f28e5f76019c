"""One sampling channel: mix by a chip waveform, ideal-lowpass, sample.

The time-domain pipeline multiplies the dense-grid input by the periodic
chip waveform, applies a brick-wall lowpass at fs/2 and reads off the
interior envelope peak.  `alias_spectrum` provides the independent
frequency-domain route: the filtered output spectrum as a coefficient-
weighted sum of fp-shifted copies of the input spectrum, with only 2q
surviving terms per band pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .mixing import ChipSequence, FourierCoeffWindow, draw_chips
from .numerics import InvalidInput, RngStream, SampleTrace
from .signal_model import (
    MultibandSpec,
    _component_spectrum,
    synthesize_cached,
    validate_spec,
)

# Fraction of the record excluded at each end from peak searches and
# comparisons; full-record spectral filtering is circular.
GUARD_FRACTION = 0.05


@dataclass(frozen=True)
class MwcConfig:
    """Converter parameters: fs = q*fp, f_nyq = M*fp, dense grid at oversample*M*fp."""

    fp: float
    q: int
    n_chips: int
    f_nyq: float
    oversample: int = 2
    n_channels: int = 1

    def __post_init__(self):
        if not self.fp > 0:
            raise InvalidInput("fp must be positive")
        if self.q < 1 or self.q % 2 == 0:
            raise InvalidInput(f"q must be a positive odd integer, got {self.q}")
        if self.n_chips < 1:
            raise InvalidInput("n_chips must be >= 1")
        if self.oversample < 2:
            raise InvalidInput("oversample must be >= 2")
        if self.n_channels < 1:
            raise InvalidInput("n_channels must be >= 1")
        if abs(self.f_nyq - self.n_chips * self.fp) > 1e-9 * self.f_nyq:
            raise InvalidInput(
                f"f_nyq ({self.f_nyq}) must equal n_chips*fp "
                f"({self.n_chips * self.fp})"
            )

    @property
    def fs(self) -> float:
        return self.q * self.fp

    @property
    def grid_rate(self) -> float:
        """Dense simulation rate; chips span exactly `oversample` grid steps."""
        return self.oversample * self.n_chips * self.fp


@dataclass(frozen=True)
class RecordWindow:
    """Simulated record: [start, start + duration)."""

    start: float = 0.0
    duration: float = 4e-6

    def __post_init__(self):
        if not self.duration > 0:
            raise InvalidInput("record duration must be positive")


@dataclass(frozen=True)
class ChannelOutput:
    """Filtered channel output and its interior peaks.

    `peak` is the envelope maximum (the continuous-amplitude proxy for the
    output magnitude), `raw_peak` the plain max of |y| on the grid; both
    exclude the guard bands.  `samples` holds the rate-fs decimation when
    the grid permits it, else None.
    """

    y_dense: SampleTrace
    samples: np.ndarray | None
    peak: float
    peak_time: float
    raw_peak: float


def guard_slice(n: int) -> slice:
    margin = int(round(GUARD_FRACTION * n))
    return slice(margin, max(n - margin, margin + 1))


@lru_cache(maxsize=32)
def _chip_index_map(n0: int, n: int, per_chip: int, n_chips: int) -> np.ndarray:
    """Grid sample -> chip index lookup; cached, treat as read-only."""
    return (((n0 + np.arange(n)) // per_chip) % n_chips).astype(np.intp)


def mix(x: SampleTrace, chips: ChipSequence) -> SampleTrace:
    """Multiply a trace by the periodic chip waveform, pointwise and exact.

    The grid must put an integer number of samples on every chip, i.e.
    x.rate must be an integer multiple of M*fp and the start time must sit
    on the grid.
    """
    per_chip_f = x.rate / (chips.n_chips * chips.fp)
    per_chip = round(per_chip_f)
    if per_chip < 1 or abs(per_chip_f - per_chip) > 1e-6:
        raise InvalidInput(
            "grid not aligned to chips: rate must be an integer multiple "
            f"of n_chips*fp (rate/(M*fp) = {per_chip_f!r})"
        )
    n0_f = x.start_time * x.rate
    n0 = round(n0_f)
    if abs(n0_f - n0) > 1e-6:
        raise InvalidInput(
            "grid not aligned to chips: start time is off the sample grid"
        )
    idx = _chip_index_map(n0, len(x.values), per_chip, chips.n_chips)
    return SampleTrace(x.start_time, x.rate, x.values * chips.chips[idx])


def l_window(l0: int, q: int) -> int:
    """First index l1 = l0 - (q-1)/2 of the q coefficients a band touches."""
    if q < 1 or q % 2 == 0:
        raise InvalidInput(f"q must be a positive odd integer, got {q}")
    return l0 - (q - 1) // 2


def _carrier_multiple(carrier: float, fp: float) -> int:
    l0 = round(carrier / fp)
    if l0 < 1 or abs(carrier / fp - l0) > 1e-9 * max(1.0, carrier / fp):
        raise InvalidInput(
            f"carrier {carrier} is not an integer multiple of fp {fp}"
        )
    return l0


@lru_cache(maxsize=64)
def _passband_bin_count(n: int, rate: float, cutoff: float) -> int:
    """Number of leading rfft bins with |f| <= cutoff (same rule as the mask)."""
    freqs = np.fft.rfftfreq(n, d=1.0 / rate)
    return int(np.searchsorted(freqs, cutoff * (1.0 + 1e-12), side="right"))


def _lowpass_rfft(values: np.ndarray, rate: float, cutoff: float) -> np.ndarray:
    """rfft of a real record with bins above the cutoff zeroed."""
    spec = np.fft.rfft(values)
    spec[_passband_bin_count(len(values), rate, cutoff) :] = 0.0
    return spec


def _envelope_from_rfft(spec: np.ndarray, n: int, keep: int | None = None) -> np.ndarray:
    """|analytic signal| reconstructed from a (masked) rfft half-spectrum.

    `keep` bounds the nonzero prefix of `spec` so the one-sided doubling
    touches only live bins; the shared Nyquist bin of an even-length
    record is never doubled.
    """
    keep = len(spec) if keep is None else min(keep, len(spec))
    full = np.zeros(n, dtype=complex)
    full[:keep] = spec[:keep]
    full[1 : min(keep, (n + 1) // 2)] *= 2.0
    return np.abs(np.fft.ifft(full))


def channel_peak(
    spec: MultibandSpec,
    chips: ChipSequence,
    cfg: MwcConfig,
    record: RecordWindow = RecordWindow(),
) -> float:
    """Interior envelope peak of the filtered channel output.

    Same result as simulate_channel(...).peak, skipping the dense output
    materialization; this is the Monte Carlo hot path.
    """
    x = synthesize_cached(spec, record.start, record.duration, cfg.grid_rate)
    mixed = mix(x, chips)
    n = len(mixed.values)
    masked = _lowpass_rfft(mixed.values, mixed.rate, cfg.fs / 2)
    keep = _passband_bin_count(n, mixed.rate, cfg.fs / 2)
    env = _envelope_from_rfft(masked, n, keep)
    return float(env[guard_slice(n)].max())


def simulate_channel(
    spec: MultibandSpec,
    chips: ChipSequence,
    cfg: MwcConfig,
    record: RecordWindow = RecordWindow(),
    validate: bool = True,
) -> ChannelOutput:
    """Run one channel: synthesize, mix, lowpass at fs/2, locate the peak.

    Decimated samples at rate fs are attached when the dense grid rate is
    an integer multiple of fs (their absence is not an error).  `validate`
    may be dropped to probe configurations outside the carrier/band rules,
    e.g. a baseband tone under identity mixing.
    """
    if validate:
        violations = validate_spec(spec, cfg.fp, cfg.q)
        if violations:
            raise InvalidInput("invalid spec: " + "; ".join(violations))
    rate = cfg.grid_rate
    x = synthesize_cached(spec, record.start, record.duration, rate)
    mixed = mix(x, chips)
    n = len(mixed.values)
    masked = _lowpass_rfft(mixed.values, rate, cfg.fs / 2)
    y_values = np.fft.irfft(masked, n)
    env = _envelope_from_rfft(masked, n, _passband_bin_count(n, rate, cfg.fs / 2))
    interior = guard_slice(n)
    k = int(np.argmax(env[interior]))
    peak = float(env[interior][k])
    peak_time = x.start_time + (interior.start + k) / rate
    raw_peak = float(np.abs(y_values[interior]).max())
    decim = cfg.oversample * cfg.n_chips
    samples = y_values[:: decim // cfg.q].copy() if decim % cfg.q == 0 else None
    return ChannelOutput(
        y_dense=SampleTrace(x.start_time, rate, y_values),
        samples=samples,
        peak=peak,
        peak_time=peak_time,
        raw_peak=raw_peak,
    )


def alias_spectrum(
    spec: MultibandSpec,
    window: FourierCoeffWindow,
    cfg: MwcConfig,
    f_grid,
) -> np.ndarray:
    """Filtered output spectrum on [-fs/2, fs/2] from the aliasing expansion.

    Y(f) = sum over components, l = l1 .. l1+q-1 of
           c_l * X(f - l*fp) + conj(c_l) * X(f + l*fp)
    with per-component windows l1 = l0 - (q-1)/2 and X the exact continuous
    component spectrum.  This is the independent oracle for the time-domain
    pipeline; the supplied window must cover every component's index range.
    """
    f = np.atleast_1d(np.asarray(f_grid, dtype=float))
    if np.any(np.abs(f) > cfg.fs / 2 * (1 + 1e-9)):
        raise InvalidInput("alias_spectrum frequencies must lie in [-fs/2, fs/2]")
    out = np.zeros(f.shape, dtype=complex)
    for comp in spec.components:
        l0 = _carrier_multiple(comp.carrier, cfg.fp)
        l1 = l_window(l0, cfg.q)
        for l in range(l1, l1 + cfg.q):
            c_l = window.coeff(l)
            out += c_l * _component_spectrum(comp, f - l * cfg.fp)
            out += np.conj(c_l) * _component_spectrum(comp, f + l * cfg.fp)
    return out


def full_system(
    spec: MultibandSpec,
    cfg: MwcConfig,
    seed: int,
    record: RecordWindow = RecordWindow(),
) -> list[ChannelOutput]:
    """Simulate all n_channels channels with independent chip draws.

    Channel i draws its chips from stream (seed, i), so the result is
    deterministic for a given seed and independent of execution order.
    """
    outputs = []
    for i in range(cfg.n_channels):
        chips = draw_chips(cfg.n_chips, RngStream(seed, i), cfg.fp)
        outputs.append(simulate_channel(spec, chips, cfg, record))
    return outputs
