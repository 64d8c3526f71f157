"""
Frequency-dependent optical elements

Sign conventions:
  - A sideband at offset Omega picks up exp(+i 2 pi Omega path / c) over a path.
  - The power mirror reflects -r1 from outside and +r1 from inside, so the
    cavity reflection is r(Omega) = -r1 + T1 r2' x / (1 - r1 r2' x) with
    x = exp(i phi), phi = 2 pi Omega / FSR. For a lossless input mirror this is
    the familiar (-r1 + r2' x) / (1 - r1 r2' x).
  - The carrier is held on resonance, so only Omega enters the response.
  - The Michelson is a lumped two-port: bright->bright = dark->dark =
    sqrt(eta) cos(delta), bright<->dark = i sqrt(eta) sin(delta).
"""
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import constants
from scipy.optimize import brentq

from squeezesim.services.errors import ValidationError

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT = constants.c

ArrayLike = Union[float, np.ndarray]


def _check_fraction(value: float, field: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"must lie in [0, 1] (got {value})", field=field)


@dataclass(frozen=True)
class MirrorSpec:
    """Power reflectivity and power loss of a mirror"""

    power_reflectivity: float
    power_loss: float = 0.0

    def __post_init__(self):
        _check_fraction(self.power_reflectivity, 'power_mirror_reflectivity')
        _check_fraction(self.power_loss, 'power_mirror_loss')
        if self.power_reflectivity + self.power_loss > 1.0 + 1e-15:
            raise ValidationError(
                f"reflectivity + loss exceeds 1 ({self.power_reflectivity} + {self.power_loss})",
                field='power_mirror_reflectivity'
            )

    @property
    def transmissivity(self) -> float:
        return max(0.0, 1.0 - self.power_reflectivity - self.power_loss)

    @property
    def amplitude_reflectivity(self) -> float:
        return float(np.sqrt(self.power_reflectivity))

    @property
    def amplitude_transmissivity(self) -> float:
        return float(np.sqrt(self.transmissivity))


# A missing power mirror is a fully transmitting one
NO_MIRROR = MirrorSpec(0.0, 0.0)


@dataclass(frozen=True)
class CavitySpec:
    """Two-mirror cavity: power mirror plus the Michelson as lumped back mirror"""

    length: float
    input_mirror: MirrorSpec
    back_reflectivity_amplitude: float
    round_trip_loss: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.length) or self.length <= 0:
            raise ValidationError(f"must be positive (got {self.length})", field='cavity_length_m')
        _check_fraction(self.back_reflectivity_amplitude, 'back_reflectivity_amplitude')
        _check_fraction(self.round_trip_loss, 'round_trip_loss')

    @property
    def effective_back_reflectivity(self) -> float:
        """r2': back reflectivity degraded by the round-trip loss"""
        return self.back_reflectivity_amplitude * float(np.sqrt(1.0 - self.round_trip_loss))

    @property
    def round_trip_gain(self) -> float:
        """g = r1 r2'"""
        return self.input_mirror.amplitude_reflectivity * self.effective_back_reflectivity

    @property
    def fsr(self) -> float:
        return free_spectral_range(self.length)


@dataclass(frozen=True)
class SidebandFrequency:
    """Sideband offset from the carrier (Hz)"""

    omega: float

    def __post_init__(self):
        if not np.isfinite(self.omega):
            raise ValidationError(f"must be finite (got {self.omega})", field='omega')

    def __float__(self) -> float:
        return float(self.omega)


@dataclass(frozen=True)
class TwoPortScattering:
    """Amplitude coefficients mapping (bright-in, dark-in) -> (bright-out, dark-out)"""

    bright_bright: complex
    bright_dark: complex
    dark_bright: complex
    dark_dark: complex

    @property
    def matrix(self) -> np.ndarray:
        # rows are outputs, columns are inputs
        return np.array([
            [self.bright_bright, self.dark_bright],
            [self.bright_dark, self.dark_dark],
        ], dtype=complex)

    def unitarity_error(self) -> float:
        s = self.matrix
        return float(np.max(np.abs(s.conj().T @ s - np.eye(2))))


def sideband_omega(omega: Union[SidebandFrequency, ArrayLike]) -> ArrayLike:
    """Plain offset frequency (Hz) from a SidebandFrequency or array-like"""
    if isinstance(omega, SidebandFrequency):
        return omega.omega
    return np.asarray(omega, dtype=float)


def free_spectral_range(length: float) -> float:
    """FSR = c / 2L of a linear cavity (Hz)"""
    if not length > 0:
        raise ValidationError(f"must be positive (got {length})", field='cavity_length_m')
    return SPEED_OF_LIGHT / (2.0 * length)


def propagation_phase(omega: Union[SidebandFrequency, ArrayLike], path: float) -> ArrayLike:
    """Unit-magnitude phase factor exp(i 2 pi Omega path / c)"""
    return np.exp(1j * 2.0 * np.pi * sideband_omega(omega) * path / SPEED_OF_LIGHT)


def _round_trip(spec: CavitySpec, omega) -> ArrayLike:
    return propagation_phase(omega, 2.0 * spec.length)


def cavity_reflection(spec: CavitySpec, omega: Union[SidebandFrequency, ArrayLike]) -> ArrayLike:
    """Amplitude reflection of the cavity seen from outside the power mirror"""
    x = _round_trip(spec, omega)
    r1 = spec.input_mirror.amplitude_reflectivity
    return -r1 + spec.input_mirror.transmissivity * spec.effective_back_reflectivity * x / (1.0 - spec.round_trip_gain * x)


def cavity_transmission(spec: CavitySpec, omega: Union[SidebandFrequency, ArrayLike]) -> ArrayLike:
    """Amplitude transmission through the back mirror, t2 = sqrt(1 - r2'^2)"""
    x = _round_trip(spec, omega)
    t2 = np.sqrt(1.0 - spec.effective_back_reflectivity ** 2)
    return spec.input_mirror.amplitude_transmissivity * t2 * np.sqrt(x) / (1.0 - spec.round_trip_gain * x)


def cavity_buildup(spec: CavitySpec) -> float:
    """
    On-resonance power recycling gain G = T1 / (1 - r1 r2')^2

    Raises:
        ValidationError: if r1 r2' = 1 (divergent buildup)
    """

    g = spec.round_trip_gain
    if g >= 1.0:
        raise ValidationError(f"divergent cavity (r1 r2' = {g})", field='round_trip_loss')
    return spec.input_mirror.transmissivity / (1.0 - g) ** 2


def cavity_linewidth(spec: CavitySpec) -> float:
    """Analytic full linewidth FSR (1 - g) / (pi sqrt(g)) (Hz)"""
    g = spec.round_trip_gain
    if g <= 0:
        raise ValidationError("no cavity: power mirror reflectivity is zero", field='power_mirror_reflectivity')
    return spec.fsr * (1.0 - g) / (np.pi * np.sqrt(g))


def half_linewidth(spec: CavitySpec) -> float:
    return cavity_linewidth(spec) / 2.0


def half_depth_frequency(spec: CavitySpec) -> float:
    """
    Sideband frequency where |r|^2 is midway between its resonant and
    anti-resonant values, found numerically on [0, FSR/2]
    """

    fsr = spec.fsr
    on_resonance = abs(cavity_reflection(spec, 0.0)) ** 2
    anti_resonance = abs(cavity_reflection(spec, fsr / 2.0)) ** 2
    if abs(anti_resonance - on_resonance) < 1e-14:
        raise ValidationError("flat reflection response, no linewidth", field='power_mirror_reflectivity')
    midpoint = 0.5 * (on_resonance + anti_resonance)

    def depth(omega: float) -> float:
        return abs(cavity_reflection(spec, omega)) ** 2 - midpoint

    result = brentq(depth, 0.0, fsr / 2.0, xtol=1e-9, rtol=1e-14)
    logger.debug(f"Half-depth frequency {result:.6g} Hz (g = {spec.round_trip_gain:.6g})")
    return result


def michelson_two_port(fringe_offset: float, arm_efficiency: float = 1.0) -> TwoPortScattering:
    """Michelson at fringe offset delta (rad) as a two-port; lossless when arm_efficiency = 1"""
    _check_fraction(arm_efficiency, 'arm_efficiency')
    amplitude = np.sqrt(arm_efficiency)
    direct = amplitude * np.cos(fringe_offset)
    cross = 1j * amplitude * np.sin(fringe_offset)
    return TwoPortScattering(
        bright_bright=complex(direct),
        bright_dark=complex(cross),
        dark_bright=complex(cross),
        dark_dark=complex(direct),
    )
