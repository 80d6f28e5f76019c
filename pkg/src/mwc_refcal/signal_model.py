"""Multiband test signal: sinc pulses on cosine carriers.

Each band component is a sqrt(E*B)*sinc(B(t-tau))*cos(2*pi*f_i*(t-tau))
pulse, i.e. a pair of flat spectral bands of width B centered at +/-f_i.
Carriers sit on integer multiples of the mixing frequency fp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .numerics import InvalidInput, SampleTrace, analytic_signal

# Relative tolerance for "carrier is an integer multiple of fp"; carriers
# off-grid are rejected, never rounded.
CARRIER_REL_TOL = 1e-9


@dataclass(frozen=True)
class BandComponent:
    """One band pair: energy E (V^2*s), width B (Hz), delay tau (s), carrier f_i (Hz).

    Zero energy is allowed so the all-zero signal is representable; width
    must be positive and the band must not straddle DC.
    """

    energy: float
    width: float
    delay: float
    carrier: float

    def __post_init__(self):
        if self.energy < 0:
            raise InvalidInput("component energy must be >= 0")
        if not self.width > 0:
            raise InvalidInput("component width must be positive")
        if not self.carrier > self.width / 2:
            raise InvalidInput("band straddles DC: carrier must exceed width/2")

    @property
    def peak_amplitude(self) -> float:
        """Pulse amplitude sqrt(E*B) at t = tau."""
        return math.sqrt(self.energy * self.width)


@dataclass(frozen=True)
class MultibandSpec:
    """A bandlimited sum of band components."""

    components: tuple[BandComponent, ...]
    f_nyq: float

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.components) < 1:
            raise InvalidInput("spec needs at least one component")
        if not self.f_nyq > 0:
            raise InvalidInput("f_nyq must be positive")
        for comp in self.components:
            if comp.carrier + comp.width / 2 > self.f_nyq / 2 * (1 + 1e-12):
                raise InvalidInput(
                    f"component at {comp.carrier} Hz extends beyond the "
                    f"Nyquist range [+-{self.f_nyq / 2} Hz]"
                )

    @property
    def n_bands(self) -> int:
        return len(self.components)


def synthesize(
    spec: MultibandSpec, start: float, duration: float, rate: float
) -> SampleTrace:
    """Sample the multiband signal on a uniform grid.

    values[n] = sum_i sqrt(E_i*B_i) * sinc(B_i*(t_n - tau_i))
                * cos(2*pi*f_i*(t_n - tau_i)),   sinc(u) = sin(pi*u)/(pi*u).
    """
    if not duration > 0:
        raise InvalidInput("duration must be positive")
    if rate < spec.f_nyq * (1 - 1e-12):
        raise InvalidInput(
            f"aliased synthesis: rate {rate} below signal Nyquist rate {spec.f_nyq}"
        )
    n = int(round(duration * rate))
    if n < 1:
        raise InvalidInput("record too short for the requested rate")
    t = start + np.arange(n) / rate
    values = np.zeros(n)
    for comp in spec.components:
        u = t - comp.delay
        values += comp.peak_amplitude * np.sinc(comp.width * u) * np.cos(
            2 * np.pi * comp.carrier * u
        )
    return SampleTrace(start, rate, values)


@lru_cache(maxsize=16)
def synthesize_cached(
    spec: MultibandSpec, start: float, duration: float, rate: float
) -> SampleTrace:
    """Memoized synthesize for fixed-signal Monte Carlo loops.

    Callers must treat the returned trace as immutable.
    """
    return synthesize(spec, start, duration, rate)


def _component_spectrum(comp: BandComponent, f: np.ndarray) -> np.ndarray:
    """Continuous-frequency Fourier transform of one band pair.

    The component is g(t - tau) for an even baseband pulse g, so the
    delay enters as one global linear phase exp(-2j*pi*f*tau) across both
    rect supports.
    """
    if comp.energy == 0.0:
        return np.zeros(np.shape(f), dtype=complex)
    f_arr = np.asarray(f, dtype=float)
    amp = 0.5 * math.sqrt(comp.energy / comp.width)
    inside = (np.abs(f_arr - comp.carrier) <= comp.width / 2) | (
        np.abs(f_arr + comp.carrier) <= comp.width / 2
    )
    return np.where(
        inside, amp * np.exp(-2j * np.pi * f_arr * comp.delay), 0.0
    )


def analytic_spectrum(spec: MultibandSpec, f) -> np.ndarray:
    """Exact continuous spectrum X(f) of the multiband signal.

    Each component contributes (1/2)*sqrt(E/B) on rect supports of width B
    at +-f_i with the linear phase of its delay.  Accepts a scalar
    frequency or an array; returns a matching complex result.
    """
    f_arr = np.asarray(f, dtype=float)
    out = np.zeros(f_arr.shape, dtype=complex)
    for comp in spec.components:
        out = out + _component_spectrum(comp, f_arr)
    if np.isscalar(f) or f_arr.ndim == 0:
        return complex(out)
    return out


def envelope(x: SampleTrace) -> tuple[SampleTrace, float]:
    """Analytic envelope |x + j*hilbert(x)| and its peak time.

    Returns (env, t0) where t0 is the grid time of the envelope maximum
    (earliest sample on ties).
    """
    xa = analytic_signal(x)
    env = np.abs(xa.values)
    t0 = x.start_time + int(np.argmax(env)) / x.rate
    return SampleTrace(x.start_time, x.rate, env), t0


def validate_spec(spec: MultibandSpec, fp: float, q: int) -> list[str]:
    """Check a spec against the mixing/sampling structure; violations as data.

    Empty result means: every band is at most fp wide, sits on an integer
    carrier multiple l0 of fp, keeps (l0 - 1/2)*fp >= q*fp/2 so the band
    stays clear of the sampled baseband, and lies inside the Nyquist range.
    """
    violations: list[str] = []
    if not fp > 0:
        return [f"mixing frequency must be positive, got {fp}"]
    if q < 1 or q % 2 == 0:
        violations.append(f"q must be a positive odd integer, got {q}")
    for i, comp in enumerate(spec.components):
        tag = f"component {i} (carrier {comp.carrier:g} Hz)"
        if comp.width > fp * (1 + 1e-12):
            violations.append(
                f"{tag}: band wider than fp ({comp.width:g} > {fp:g})"
            )
        ratio = comp.carrier / fp
        l0 = round(ratio)
        if l0 < 1 or abs(ratio - l0) > CARRIER_REL_TOL * max(1.0, abs(ratio)):
            violations.append(
                f"{tag}: carrier is not an integer multiple of fp "
                f"(carrier/fp = {ratio!r})"
            )
        elif q >= 1 and q % 2 == 1:
            if (l0 - 0.5) * fp < q * fp / 2 * (1 - 1e-12):
                violations.append(
                    f"{tag}: band aliases into the sampled baseband, "
                    f"(l0 - 1/2)*fp = {(l0 - 0.5) * fp:g} < fs/2 = {q * fp / 2:g}"
                )
        if comp.carrier + comp.width / 2 > spec.f_nyq / 2 * (1 + 1e-12):
            violations.append(f"{tag}: band outside the Nyquist range")
    return violations
