"""Shared numeric kernels.

Spectral one-siding (analytic signal), brick-wall filtering by spectral
masking, the two quantile rules used throughout (standard-normal two-sided
threshold and the order-statistic empirical quantile), and reproducible
counter-based random streams.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

import numpy as np


class InvalidInput(ValueError):
    """An argument violates an operation's contract."""


@dataclass(frozen=True)
class SampleTrace:
    """Uniformly gridded real or complex samples.

    Attributes
    ----------
    start_time : float
        Time of the first sample, seconds.
    rate : float
        Grid rate, samples per second.
    values : ndarray
        Sample amplitudes in volts; real or complex, 1-D, non-empty.
    """

    start_time: float
    rate: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        object.__setattr__(self, "values", values)
        if not self.rate > 0:
            raise InvalidInput("trace rate must be positive")
        if values.ndim != 1 or values.size == 0:
            raise InvalidInput("trace values must be a non-empty 1-D sequence")

    @property
    def duration(self) -> float:
        return len(self.values) / self.rate

    def times(self) -> np.ndarray:
        return self.start_time + np.arange(len(self.values)) / self.rate


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream keyed by (seed, stream_id).

    Backed by numpy's Philox counter-based bit generator with the 128-bit
    key (seed, stream_id).  The same key replays the same draw sequence on
    any platform; distinct stream ids give statistically independent
    streams, so parallel trials never share a stream.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array(
            [self.seed % 2**64, self.stream_id % 2**64], dtype=np.uint64
        )
        return np.random.Generator(np.random.Philox(key=key))


def analytic_signal(x: SampleTrace) -> SampleTrace:
    """Discrete analytic signal of a real trace via spectral one-siding.

    Returns x + j*h on the same grid, where h is the discrete Hilbert
    transform of x.  The real part of the output is the input array
    itself and the negative-frequency bins of the result are zero.
    """
    if np.iscomplexobj(x.values):
        raise InvalidInput("analytic_signal expects a real trace")
    n = len(x.values)
    if n < 2:
        raise InvalidInput("analytic_signal needs at least 2 samples")
    spec = np.fft.fft(x.values)
    weight = np.zeros(n)
    weight[0] = 1.0
    if n % 2 == 0:
        weight[n // 2] = 1.0
        weight[1 : n // 2] = 2.0
    else:
        weight[1 : (n + 1) // 2] = 2.0
    quadrature = np.fft.ifft(spec * weight).imag
    return SampleTrace(x.start_time, x.rate, x.values + 1j * quadrature)


def brickwall_lowpass(x: SampleTrace, cutoff: float) -> SampleTrace:
    """Ideal lowpass by spectral masking on the full record.

    Bins with |f| <= cutoff pass unchanged, all others are zeroed.  The
    record is treated as one period (circular filtering), so comparisons
    downstream exclude guard bands at the record edges.
    """
    if not 0 < cutoff <= x.rate / 2:
        raise InvalidInput(
            f"cutoff must lie in (0, rate/2], got {cutoff} at rate {x.rate}"
        )
    n = len(x.values)
    freqs = np.fft.fftfreq(n, d=1.0 / x.rate)
    mask = np.abs(freqs) <= cutoff * (1.0 + 1e-12)
    out = np.fft.ifft(np.fft.fft(x.values) * mask)
    if not np.iscomplexobj(x.values):
        out = out.real
    return SampleTrace(x.start_time, x.rate, out)


def normal_quantile(p0: float) -> float:
    """Two-sided standard-normal threshold y with 2*Phi(y) - 1 = p0."""
    if not 0.0 <= p0 < 1.0:
        raise InvalidInput(f"p0 must lie in [0, 1), got {p0}")
    if p0 == 0.0:
        return 0.0
    return statistics.NormalDist().inv_cdf((1.0 + p0) / 2.0)


def empirical_quantile(values, p0: float) -> float:
    """Order-statistic threshold: floor(p0*T) + 1 smallest of T values.

    This is the smallest value strictly larger than floor(p0*T) of the
    others; no interpolation.  Invariant under permutation of the input.
    """
    vals = np.asarray(values, dtype=float)
    if vals.size == 0:
        raise InvalidInput("empirical_quantile needs a non-empty sequence")
    if not 0.0 <= p0 < 1.0:
        raise InvalidInput(f"p0 must lie in [0, 1), got {p0}")
    t = vals.size
    # Nudge before flooring: p0*t for decimal p0 (0.99 * 5000) can land a
    # few ulp below the exact integer product.
    k = int(math.floor(p0 * t + 1e-9)) + 1
    k = min(k, t)
    return float(np.partition(vals, k - 1)[k - 1])
