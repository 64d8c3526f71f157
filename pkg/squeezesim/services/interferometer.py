"""
Power-recycled Michelson with squeezed vacuum at the dark port

Network (sideband picture, carrier on cavity resonance):

    laser --[power mirror r1, T1, A1]--(L)--[round-trip loss l]--+
                                                                 |
                                      bright port  [Michelson delta, eta]  dark port
                                                                 |
    squeezer --[rotator pass 1]--> dark in      dark out --[rotator pass 2]--[homodyne]--> V_pd

With beta = r1 sqrt(1 - l), c = cos(delta), s = sin(delta),
x = exp(i 2 pi Omega 2L / c0) and D = 1 - beta sqrt(eta) c x, the dark-port
output of the recycled Michelson is

    dark in      sqrt(eta) c - eta s^2 beta x / D
    laser        i sqrt(eta) s t1 sqrt(x) / D
    cavity loss  i sqrt(eta) s r1 sqrt(l) x / D
    mirror loss  i sqrt(eta) s sqrt(A1) sqrt(x) / D
    arm loss     i sqrt(eta) s beta sqrt(1 - eta) x / D   (bright side)
                 sqrt(1 - eta)                          (dark side)

whose squared magnitudes sum to one. Rotator passes and the homodyne then
act as beamsplitters, each adding its own vacuum port. The detected
variance is

    V_pd = |T_LO|^2 V_LO + |T_sqz|^2 V_sqz + sum |T_v|^2,

evaluated as 1 + |T_LO|^2 (V_LO - 1) + |T_sqz|^2 (V_sqz - 1), which is the
same expression once the transfer set is complete.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
from scipy import constants
from scipy.optimize import bisect

from squeezesim.config import Config
from squeezesim.services.detection import (
    SQUEEZE_REFERENCES,
    HomodyneSpec,
    homodyne_efficiency,
    source_variance,
)
from squeezesim.services.errors import SolverError, ValidationError
from squeezesim.services.optics import (
    NO_MIRROR,
    CavitySpec,
    MirrorSpec,
    SidebandFrequency,
    cavity_buildup,
    free_spectral_range,
    propagation_phase,
    sideband_omega,
)
from squeezesim.services.quadrature import (
    QuadratureCovariance,
    SqueezeSpec,
    linear_to_db,
    measured_variance,
)

logger = logging.getLogger(__name__)

VACUUM_PORTS = (
    'rotator_pass_1',
    'rotator_pass_2',
    'arm_bright',
    'arm_dark',
    'cavity_round_trip',
    'power_mirror',
    'homodyne',
)

# Readout quadrature; squeeze angles are measured from it
READOUT_ANGLE = 0.0


@dataclass(frozen=True)
class InterferometerConfig:
    """Geometry, losses, detection and squeezing of one interferometer"""

    input_power: float
    power_mirror: Optional[MirrorSpec]
    cavity_length: float
    target_dark_power: float
    rotator_double_pass_loss: float = 0.0
    arm_efficiency: float = 1.0
    round_trip_loss: float = 0.0
    homodyne: HomodyneSpec = field(default_factory=HomodyneSpec)
    squeeze: Optional[SqueezeSpec] = None
    squeeze_reference: str = 'source'
    wavelength: float = 1064e-9

    def __post_init__(self):
        for name in ('input_power', 'target_dark_power'):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValidationError(f"must be a non-negative power (got {value})", field=name)
        for name in ('rotator_double_pass_loss', 'arm_efficiency', 'round_trip_loss'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"must lie in [0, 1] (got {value})", field=name)
        if not np.isfinite(self.cavity_length) or self.cavity_length <= 0:
            raise ValidationError(f"must be positive (got {self.cavity_length})", field='cavity_length')
        if not (np.isfinite(self.wavelength) and self.wavelength > 0):
            raise ValidationError(f"must be positive (got {self.wavelength})", field='wavelength')
        if self.squeeze_reference not in SQUEEZE_REFERENCES:
            raise ValidationError(
                f"must be one of {SQUEEZE_REFERENCES} (got {self.squeeze_reference!r})", field='squeeze_reference'
            )

    @property
    def mirror(self) -> MirrorSpec:
        return self.power_mirror if self.power_mirror is not None else NO_MIRROR

    @property
    def input_beam_variance(self) -> QuadratureCovariance:
        """Input beam noise; the dark-port carrier derived from it is the readout local oscillator"""
        return self.homodyne.lo_variance

    @property
    def rotator_single_pass(self) -> float:
        """Power transmission of one rotator pass (the double-pass loss split evenly)"""
        return float(np.sqrt(1.0 - self.rotator_double_pass_loss))

    @property
    def loop_reflectivity(self) -> float:
        """r1 sqrt(1 - l) sqrt(eta): round-trip amplitude before the cos(delta) factor"""
        return self.mirror.amplitude_reflectivity * float(np.sqrt((1.0 - self.round_trip_loss) * self.arm_efficiency))

    def geometry(self) -> 'InterferometerConfig':
        """Same configuration with the squeezed input removed"""
        return replace(self, squeeze=None, squeeze_reference='source')


@dataclass(frozen=True)
class OperatingPoint:
    """Solved fringe offset and the powers it implies"""

    fringe_offset: float
    circulating_power: float
    recycling_gain: float
    dark_port_power: float
    effective_michelson_reflectivity: float

    def to_dict(self) -> Dict[str, float]:
        return {
            'fringe_offset_rad': self.fringe_offset,
            'effective_reflectivity': self.effective_michelson_reflectivity,
            'recycling_gain': self.recycling_gain,
            'circulating_power_w': self.circulating_power,
            'dark_port_power_w': self.dark_port_power,
        }


@dataclass(frozen=True)
class TransferSet:
    """Transfer coefficients from each input port to the detected quadrature at one frequency"""

    t_lo: complex
    t_sqz: complex
    t_vac: List[complex]
    omega: SidebandFrequency

    @property
    def vacuum_ports(self) -> Tuple[str, ...]:
        return VACUUM_PORTS

    @property
    def completeness(self) -> float:
        return abs(self.t_lo) ** 2 + abs(self.t_sqz) ** 2 + sum(abs(t) ** 2 for t in self.t_vac)


@dataclass(frozen=True)
class NoiseSpectrum:
    """Detected variance and transfer powers over a frequency axis"""

    frequencies: np.ndarray
    v_pd: np.ndarray
    v_pd_db: np.ndarray
    t_lo_sq: np.ndarray
    t_sqz_sq: np.ndarray
    t_vac_sq_total: np.ndarray

    def __len__(self) -> int:
        return len(self.frequencies)

    def rows(self) -> Iterator[Tuple[float, float, float]]:
        """(omega, v_pd linear, v_pd dB) per frequency"""
        for omega, v, v_db in zip(self.frequencies, self.v_pd, self.v_pd_db):
            yield float(omega), float(v), float(v_db)


def min_detectable_phase(n: float) -> float:
    """Shot-noise limited phase sensitivity 1/sqrt(n) for n detected photons"""
    if not n > 0:
        raise ValidationError(f"photon number must be positive (got {n})", field='n')
    return float(1.0 / np.sqrt(n))


def photon_rate(power: float, wavelength: float) -> float:
    """Photons per second carried by `power` watts at `wavelength` metres"""
    return power * wavelength / (constants.h * constants.c)


def _dark_power(config: InterferometerConfig, delta: float) -> float:
    gain = config.mirror.transmissivity / (1.0 - config.loop_reflectivity * np.cos(delta)) ** 2
    return config.input_power * gain * config.arm_efficiency * np.sin(delta) ** 2


def _peak_offset(config: InterferometerConfig) -> float:
    """Fringe offset maximising dark-port power; dark power rises monotonically up to it"""
    return float(np.arccos(min(config.loop_reflectivity, 1.0)))


def max_dark_power(config: InterferometerConfig) -> float:
    """Largest dark-port power on the branch nearest the dark fringe (W)"""
    if config.mirror.transmissivity == 0 or config.loop_reflectivity >= 1.0:
        return 0.0
    return float(_dark_power(config, _peak_offset(config)))


def cavity_spec(config: InterferometerConfig, fringe_offset: float) -> CavitySpec:
    """Power cavity closed by the Michelson bright port at this fringe offset"""
    return CavitySpec(
        length=config.cavity_length,
        input_mirror=config.mirror,
        back_reflectivity_amplitude=float(np.sqrt(config.arm_efficiency) * np.cos(fringe_offset)),
        round_trip_loss=config.round_trip_loss,
    )


def _operating_point(config: InterferometerConfig, delta: float) -> OperatingPoint:
    gain = cavity_buildup(cavity_spec(config, delta))
    circulating = config.input_power * gain
    return OperatingPoint(
        fringe_offset=delta,
        circulating_power=circulating,
        recycling_gain=gain,
        dark_port_power=circulating * np.sin(delta) ** 2 * config.arm_efficiency,
        effective_michelson_reflectivity=float(np.sqrt(config.arm_efficiency) * np.cos(delta)),
    )


def solve_operating_point(
    config: InterferometerConfig,
    xtol: Optional[float] = None,
    max_iter: Optional[int] = None
) -> OperatingPoint:
    """
    Find the fringe offset delta that puts `target_dark_power` at the dark port

    The circulating power depends on delta through the cavity buildup, so the
    dark power P_in G(delta) eta sin^2(delta) is solved by bisection on
    [0, arccos(r1 sqrt(1 - l) sqrt(eta))], where it is monotone.

    Raises:
        ValidationError: target above the achievable maximum
        SolverError: no convergence within `max_iter` iterations
    """

    xtol = Config.SOLVER_XTOL if xtol is None else xtol
    max_iter = Config.SOLVER_MAX_ITER if max_iter is None else max_iter
    target = config.target_dark_power

    if target == 0:
        return _operating_point(config, 0.0)

    ceiling = max_dark_power(config)
    if target > ceiling * (1 + 1e-12):
        raise ValidationError(
            f"{target:.6g} W not achievable (maximum {ceiling:.6g} W)", field='target_dark_power'
        )

    upper = _peak_offset(config)
    if target >= ceiling:
        delta = upper
    else:
        try:
            delta = bisect(lambda d: _dark_power(config, d) - target, 0.0, upper, xtol=xtol, maxiter=max_iter)
        except RuntimeError as e:
            raise SolverError(f"operating point did not converge: {e}") from e

    point = _operating_point(config, delta)
    logger.debug(
        f"Operating point: delta = {delta:.9g} rad, G = {point.recycling_gain:.6g}, "
        f"cos(delta) = {point.effective_michelson_reflectivity:.6g}"
    )
    return point


def fit_round_trip_loss(power_mirror: MirrorSpec, target_gain: float, michelson_reflectivity: float) -> float:
    """
    Round-trip loss l such that T1 / (1 - r1 r_m sqrt(1 - l))^2 = target_gain

    Raises:
        ValidationError: target outside [T1, lossless gain]
    """

    t1 = power_mirror.transmissivity
    r1 = power_mirror.amplitude_reflectivity
    product = r1 * michelson_reflectivity
    if product >= 1.0:
        raise ValidationError("lossless cavity has divergent gain", field='recycling_gain_target')

    lossless = t1 / (1.0 - product) ** 2
    if not np.isfinite(target_gain) or target_gain <= 0:
        raise ValidationError(f"must be positive (got {target_gain})", field='recycling_gain_target')
    if target_gain > lossless * (1 + 1e-12):
        raise ValidationError(
            f"{target_gain:.6g} exceeds the lossless maximum {lossless:.6g}", field='recycling_gain_target'
        )
    if target_gain < t1 * (1 - 1e-12):
        raise ValidationError(
            f"{target_gain:.6g} is below the fully lossy minimum {t1:.6g}", field='recycling_gain_target'
        )
    if product == 0:
        return 0.0

    back = (1.0 - np.sqrt(t1 / target_gain)) / product
    loss = float(min(max(1.0 - back ** 2, 0.0), 1.0))
    logger.info(f"Fitted round-trip loss {loss:.6g} for gain {target_gain:.4g}")
    return loss


def fit_loss_for_gain(config: InterferometerConfig, target_gain: float) -> InterferometerConfig:
    """
    Fit the lumped round-trip loss so that the solved operating point has
    recycling gain `target_gain` at the configured input and dark powers
    """

    if config.input_power <= 0 or config.arm_efficiency <= 0:
        raise ValidationError("needs positive input power and arm efficiency", field='recycling_gain_target')
    leak = config.target_dark_power / (target_gain * config.input_power * config.arm_efficiency)
    if leak > 1.0:
        raise ValidationError(
            f"gain {target_gain:.4g} cannot deliver the dark-port power", field='recycling_gain_target'
        )
    cos_delta = np.sqrt(1.0 - leak)
    reflectivity = float(np.sqrt(config.arm_efficiency) * cos_delta)
    loss = fit_round_trip_loss(config.mirror, target_gain, reflectivity)
    fitted = replace(config, round_trip_loss=loss)

    # the fitted point must sit on the near-dark-fringe branch the solver searches
    if cos_delta < fitted.loop_reflectivity:
        raise ValidationError(
            f"gain {target_gain:.4g} puts the fringe beyond the dark-power peak", field='recycling_gain_target'
        )
    return fitted


def _port_amplitudes(config: InterferometerConfig, op_point: OperatingPoint, omega) -> Dict[str, np.ndarray]:
    """Dark-out amplitudes of the recycled Michelson for every input port"""

    eta = config.arm_efficiency
    c, s = np.cos(op_point.fringe_offset), np.sin(op_point.fringe_offset)
    r1 = config.mirror.amplitude_reflectivity
    loss = config.round_trip_loss
    beta = r1 * np.sqrt(1.0 - loss)

    x = propagation_phase(omega, 2.0 * config.cavity_length)
    half = propagation_phase(omega, config.cavity_length)
    denominator = 1.0 - beta * np.sqrt(eta) * c * x
    leak = 1j * np.sqrt(eta) * s / denominator

    return {
        'dark': np.sqrt(eta) * c - eta * s * s * beta * x / denominator,
        'laser': leak * config.mirror.amplitude_transmissivity * half,
        'cavity_round_trip': leak * r1 * np.sqrt(loss) * x,
        'power_mirror': leak * np.sqrt(config.mirror.power_loss) * half,
        'arm_bright': leak * beta * np.sqrt(1.0 - eta) * x,
        'arm_dark': np.full_like(x, np.sqrt(1.0 - eta)),
    }


def michelson_dark_response(config: InterferometerConfig, op_point: OperatingPoint, omega) -> np.ndarray:
    """Dark-in to dark-out amplitude of the recycled Michelson alone"""
    return _port_amplitudes(config, op_point, sideband_omega(omega))['dark']


def _transfer_arrays(config: InterferometerConfig, op_point: OperatingPoint, omega) -> Dict[str, np.ndarray]:
    """Transfer amplitudes from every input to the detected quadrature"""

    ports = _port_amplitudes(config, op_point, omega)
    single = config.rotator_single_pass
    detection = np.sqrt(homodyne_efficiency(config.homodyne))
    to_detector = detection * np.sqrt(single)

    transfers = {
        't_lo': to_detector * ports['laser'],
        't_sqz': to_detector * np.sqrt(single) * ports['dark'],
        'rotator_pass_1': to_detector * np.sqrt(1.0 - single) * ports['dark'],
        'rotator_pass_2': np.full_like(ports['dark'], detection * np.sqrt(1.0 - single)),
        'homodyne': np.full_like(ports['dark'], np.sqrt(1.0 - homodyne_efficiency(config.homodyne))),
    }
    for name in ('arm_bright', 'arm_dark', 'cavity_round_trip', 'power_mirror'):
        transfers[name] = to_detector * ports[name]
    return transfers


def transfer_functions(
    config: InterferometerConfig,
    op_point: OperatingPoint,
    omega: Union[SidebandFrequency, float]
) -> TransferSet:
    """Transfer coefficients of every input port at one sideband frequency"""

    sideband = omega if isinstance(omega, SidebandFrequency) else SidebandFrequency(float(omega))
    transfers = _transfer_arrays(config, op_point, sideband.omega)
    return TransferSet(
        t_lo=complex(transfers['t_lo']),
        t_sqz=complex(transfers['t_sqz']),
        t_vac=[complex(transfers[name]) for name in VACUUM_PORTS],
        omega=sideband,
    )


def input_variances(config: InterferometerConfig) -> Tuple[float, float]:
    """(V_LO, V_sqz) measured in the readout quadrature"""
    v_lo = float(measured_variance(config.input_beam_variance, READOUT_ANGLE))
    if config.squeeze is None:
        return v_lo, 1.0
    state = source_variance(config.squeeze, config.homodyne, config.squeeze_reference)
    return v_lo, float(measured_variance(state, READOUT_ANGLE))


def noise_spectrum(
    config: InterferometerConfig,
    omega_range,
    op_point: Optional[OperatingPoint] = None
) -> NoiseSpectrum:
    """
    Detected variance V_pd over a frequency axis

    Frequencies are evaluated as one vectorised array; each point is
    independent of the others.
    """

    op_point = op_point or solve_operating_point(config)
    frequencies = np.atleast_1d(np.asarray(omega_range, dtype=float))
    transfers = _transfer_arrays(config, op_point, frequencies)
    v_lo, v_sqz = input_variances(config)

    t_lo_sq = np.abs(transfers['t_lo']) ** 2
    t_sqz_sq = np.abs(transfers['t_sqz']) ** 2
    t_vac_sq = sum(np.abs(transfers[name]) ** 2 for name in VACUUM_PORTS)

    v_pd = 1.0 + t_lo_sq * (v_lo - 1.0) + t_sqz_sq * (v_sqz - 1.0)
    return NoiseSpectrum(
        frequencies=frequencies,
        v_pd=v_pd,
        v_pd_db=linear_to_db(v_pd),
        t_lo_sq=t_lo_sq,
        t_sqz_sq=t_sqz_sq,
        t_vac_sq_total=t_vac_sq,
    )


def detected_variance(config: InterferometerConfig, op_point: OperatingPoint, omega: float) -> float:
    return float(noise_spectrum(config, [omega], op_point).v_pd[0])


def noise_floor(config: InterferometerConfig, op_point: Optional[OperatingPoint] = None) -> float:
    """Detected variance far outside the cavity linewidth (at the anti-resonance FSR/2)"""
    op_point = op_point or solve_operating_point(config)
    return detected_variance(config, op_point, free_spectral_range(config.cavity_length) / 2.0)


def signal_response(
    config: InterferometerConfig,
    op_point: OperatingPoint,
    signal_frequency: float,
    modulation_depth: float
) -> float:
    """
    Signal sideband power reaching the detector (W)

    A differential arm modulation of depth m puts P_circ m^2 / 2 into signal
    sidebands, which leave through the dark port with the Michelson's
    dark-port response and then pass rotator pass 2 and the homodyne.
    """

    dark = michelson_dark_response(config, op_point, signal_frequency)
    out = config.rotator_single_pass * homodyne_efficiency(config.homodyne)
    return float(op_point.circulating_power * modulation_depth ** 2 / 2.0 * np.abs(dark) ** 2 * out)


def signal_to_shot_noise_db(
    config: InterferometerConfig,
    op_point: OperatingPoint,
    signal_frequency: float,
    modulation_depth: float,
    rbw: float
) -> float:
    """Signal level relative to the SNL in one resolution bandwidth: 10 log10(P_sig / (h nu RBW))"""
    power = signal_response(config, op_point, signal_frequency, modulation_depth)
    if power <= 0:
        return float('-inf')
    quantum = constants.h * constants.c / config.wavelength
    return float(10.0 * np.log10(power / (quantum * rbw)))


def phase_sensitivity(config: InterferometerConfig, op_point: OperatingPoint, omega: float) -> float:
    """Phase noise (rad/sqrt(Hz)): photon-counting limit at the beamsplitter scaled by sqrt(V_pd)"""
    rate = photon_rate(op_point.circulating_power, config.wavelength)
    return min_detectable_phase(rate) * float(np.sqrt(detected_variance(config, op_point, omega)))


def snr_improvement(
    config_with_sqz: InterferometerConfig,
    config_without_sqz: InterferometerConfig,
    signal_frequency: float,
    electronic_noise: float = 0.0
) -> float:
    """
    SNR gain from squeezing at the signal frequency (dB)

    The signal does not depend on the squeezed input, so the gain is the
    noise ratio. `electronic_noise` is an optional additive floor (rel. SNL).

    Raises:
        ValidationError: the configurations differ in more than the squeezed input
    """

    if config_with_sqz.geometry() != config_without_sqz.geometry():
        raise ValidationError("configurations must share geometry", field='geometry')

    op_point = solve_operating_point(config_with_sqz)
    squeezed = detected_variance(config_with_sqz, op_point, signal_frequency) + electronic_noise
    plain = detected_variance(config_without_sqz, op_point, signal_frequency) + electronic_noise
    return float(-10.0 * np.log10(squeezed / plain))
