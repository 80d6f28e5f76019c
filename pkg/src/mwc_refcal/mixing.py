"""Pseudorandom +/-1 chip sequences and their Fourier coefficients.

A mixing waveform is one period of M chips, each +1 or -1.  Its l-th
Fourier coefficient is c_l = d_l * sum_k alpha_k * phi**(l*k) with
phi = exp(-2j*pi/M), where d_l is the transform of the single-chip
rectangle.  The statistics of {c_l} over random chip draws (spread of
Re{c_l}, phase uniformity) drive the reference-voltage law.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import InvalidInput, RngStream


@dataclass(frozen=True)
class ChipSequence:
    """One period of a +/-1 mixing waveform: M chips at chip rate M*fp."""

    chips: np.ndarray
    fp: float

    def __post_init__(self):
        chips = np.asarray(self.chips)
        object.__setattr__(self, "chips", chips)
        if chips.ndim != 1 or chips.size < 1:
            raise InvalidInput("chips must be a non-empty 1-D sequence")
        if not np.all(np.abs(chips) == 1):
            raise InvalidInput("every chip must be +1 or -1")
        if not self.fp > 0:
            raise InvalidInput("fp must be positive")

    @property
    def n_chips(self) -> int:
        return len(self.chips)

    @property
    def period(self) -> float:
        return 1.0 / self.fp


@dataclass(frozen=True)
class FourierCoeffWindow:
    """Coefficients c_l for l = l_start .. l_start + len(coeffs) - 1."""

    l_start: int
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        object.__setattr__(self, "coeffs", coeffs)
        if coeffs.ndim != 1 or coeffs.size < 1:
            raise InvalidInput("window must hold at least one coefficient")

    @property
    def l_stop(self) -> int:
        """One past the last index, range-style."""
        return self.l_start + len(self.coeffs)

    def indices(self) -> np.ndarray:
        return self.l_start + np.arange(len(self.coeffs))

    def coeff(self, l: int) -> complex:
        if not self.l_start <= l < self.l_stop:
            raise InvalidInput(
                f"window [{self.l_start}, {self.l_stop}) does not cover l={l}"
            )
        return complex(self.coeffs[l - self.l_start])


def draw_chips(n_chips: int, rng: RngStream, fp: float) -> ChipSequence:
    """Draw M fair independent +/-1 chips, consuming exactly M draws."""
    if n_chips < 1:
        raise InvalidInput("need at least one chip")
    bits = rng.generator().integers(0, 2, size=n_chips)
    return ChipSequence(chips=(2 * bits - 1).astype(np.int8), fp=fp)


def d_factor(l, n_chips: int):
    """Single-chip rectangle transform d_l.

    d_0 = 1/M and d_l = (1 - exp(-2j*pi*l/M)) / (2j*pi*l) otherwise; this
    is the closed form of (1/T_p) * integral of exp(-2j*pi*l*t/T_p) over
    one chip.  Reducing l mod M in the exponential keeps d_l exactly zero
    at nonzero multiples of M.  Accepts a scalar or an array of indices.
    """
    if n_chips < 1:
        raise InvalidInput("need at least one chip")
    l_arr = np.asarray(l)
    scalar = np.isscalar(l) or l_arr.ndim == 0
    l_arr = np.atleast_1d(l_arr).astype(np.int64)
    num = 1.0 - np.exp(-2j * np.pi * (l_arr % n_chips) / n_chips)
    den = 2j * np.pi * np.where(l_arr == 0, 1, l_arr)
    out = np.where(l_arr == 0, 1.0 / n_chips, num / den)
    return complex(out[0]) if scalar else out


def fourier_coeffs(
    chips: ChipSequence, l_start: int, count: int
) -> FourierCoeffWindow:
    """Coefficients c_l = d_l * sum_k alpha_k * phi**(l*k) over a window.

    The chip sum is periodic in l with period M, so one M-point transform
    of the chip sequence serves every window.
    """
    if count < 1:
        raise InvalidInput("window count must be >= 1")
    m = chips.n_chips
    chip_fft = np.fft.fft(chips.chips.astype(float))
    ls = l_start + np.arange(count, dtype=np.int64)
    coeffs = d_factor(ls, m) * chip_fft[ls % m]
    return FourierCoeffWindow(l_start=l_start, coeffs=coeffs)


def sampled_line_weights(
    chips: ChipSequence, samples_per_chip: int, l_start: int, count: int
) -> FourierCoeffWindow:
    """Fourier lines of the chip waveform held over a finite sample grid.

    A dense-grid simulation multiplies by the waveform sampled at
    `samples_per_chip` points per chip, whose line weights replace the
    chip rectangle's integral by a Dirichlet sum: the hold factor is
    (1 - exp(-2j*pi*l/M)) / (O*M*(1 - exp(-2j*pi*l/(O*M)))) with O the
    per-chip sample count, tending to d_l as O grows.  Use these weights
    when a frequency-domain expansion must match the sampled pipeline
    bin for bin; the continuous coefficients lag them by a quarter-chip
    phase and miss the spectral folds at multiples of O*M.
    """
    if samples_per_chip < 1:
        raise InvalidInput("samples_per_chip must be >= 1")
    if count < 1:
        raise InvalidInput("window count must be >= 1")
    m = chips.n_chips
    om = m * samples_per_chip
    chip_fft = np.fft.fft(chips.chips.astype(float))
    ls = l_start + np.arange(count, dtype=np.int64)
    num = 1.0 - np.exp(-2j * np.pi * (ls % m) / m)
    den = om * (1.0 - np.exp(-2j * np.pi * (ls % om) / om))
    on_grid = ls % om == 0
    hold = np.where(on_grid, 1.0 / m, num / np.where(on_grid, 1.0, den))
    return FourierCoeffWindow(l_start=l_start, coeffs=hold * chip_fft[ls % m])


def _pooled(ensemble) -> np.ndarray:
    windows = list(ensemble)
    if not windows:
        return np.empty(0, dtype=complex)
    return np.concatenate([np.asarray(w.coeffs) for w in windows])


def sigma_hat(ensemble) -> float:
    """Sample std of Re{c_l} pooled over windows and l (ddof = 1)."""
    pooled = _pooled(ensemble)
    if pooled.size < 2:
        raise InvalidInput("sigma_hat needs at least 2 pooled coefficients")
    return float(np.std(pooled.real, ddof=1))


def phase_uniformity(ensemble) -> float:
    """Circular resultant |mean exp(j*theta_l)| of pooled coefficient phases.

    Near zero for uniformly distributed phases, 1 for fully concentrated.
    """
    pooled = _pooled(ensemble)
    if pooled.size < 1:
        raise InvalidInput("phase_uniformity needs at least one coefficient")
    return float(np.abs(np.mean(np.exp(1j * np.angle(pooled)))))
