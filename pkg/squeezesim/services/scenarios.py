"""
Scenario files and built-in presets

A scenario is a flat `key = value` text file; units are part of the key
name. Blank lines and `#` comments are ignored. Keys not in SCHEMA are
rejected, as are duplicates.
"""
import io
import logging
import math
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np
from dotenv.parser import parse_stream

from squeezesim.config import Config
from squeezesim.services.detection import SQUEEZE_REFERENCES, HomodyneSpec
from squeezesim.services.errors import ValidationError
from squeezesim.services.interferometer import (
    InterferometerConfig,
    cavity_spec,
    fit_loss_for_gain,
    max_dark_power,
    solve_operating_point,
)
from squeezesim.services.optics import MirrorSpec, free_spectral_range, half_linewidth
from squeezesim.services.quadrature import QuadratureCovariance, SqueezeSpec, db_to_linear

logger = logging.getLogger(__name__)

PRESET_DIR = Path(__file__).resolve().parent.parent / 'presets'
SCENARIO_SUFFIX = '.scn'

VARIANTS = ('simple', 'prm')
SPACINGS = ('log', 'linear')

# Axis used when the scenario has no power cavity to size it from
FALLBACK_AXIS_HZ = (1e6, 100e6)


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ('on', 'true', 'yes', '1'):
        return True
    if value in ('off', 'false', 'no', '0'):
        return False
    raise ValueError(f"expected on/off, got {text!r}")


def _parse_float(text: str) -> float:
    result = float(text.strip())
    if not math.isfinite(result):
        raise ValueError(f"must be a finite number (got {text.strip()!r})")
    return result


def _parse_level(text: str) -> float:
    """dBm level; none or -inf for an absent floor"""
    if text.strip().lower() in ('none', '-inf'):
        return float('-inf')
    return _parse_float(text)


def _parse_choice(*choices: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        value = text.strip().lower()
        if value not in choices:
            raise ValueError(f"expected one of {choices}, got {text!r}")
        return value
    return parse


# key -> (parser, description)
SCHEMA: Dict[str, Tuple[Callable[[str], object], str]] = {
    'name': (str.strip, 'scenario identifier'),
    'variant': (_parse_choice(*VARIANTS), 'default interferometer: simple or prm'),
    'squeezed': (_parse_bool, 'default squeezed input: on or off'),
    'input_power_mw': (_parse_float, 'laser power at the power mirror (mW)'),
    'dark_port_power_mw': (_parse_float, 'carrier power held at the dark port (mW)'),
    'power_mirror_reflectivity': (_parse_float, 'power reflectivity of the recycling mirror'),
    'power_mirror_loss': (_parse_float, 'power loss of the recycling mirror'),
    'cavity_length_m': (_parse_float, 'power cavity length (m)'),
    'round_trip_loss': (_parse_float, 'explicit lumped round-trip power loss'),
    'recycling_gain_target': (_parse_float, 'fit the round-trip loss to this recycling gain'),
    'arm_efficiency': (_parse_float, 'Michelson arm power efficiency'),
    'rotator_double_pass_loss': (_parse_float, 'Faraday rotator loss over both passes'),
    'squeeze_db': (_parse_float, 'squeezing below the SNL (dB)'),
    'squeeze_angle_rad': (_parse_float, 'squeezed quadrature angle from the readout quadrature (rad)'),
    'squeeze_reference': (_parse_choice(*SQUEEZE_REFERENCES), 'squeeze_db quoted at the source or as detected'),
    'input_beam_excess_db': (_parse_float, 'classical excess noise of the input beam above the SNL (dB)'),
    'quantum_efficiency': (_parse_float, 'photodiode quantum efficiency'),
    'fringe_visibility': (_parse_float, 'homodyne fringe visibility'),
    'wavelength_nm': (_parse_float, 'laser wavelength (nm)'),
    'freq_start_hz': (_parse_float, 'first spectrum frequency (Hz)'),
    'freq_stop_hz': (_parse_float, 'last spectrum frequency (Hz)'),
    'freq_points': (int, 'number of spectrum frequencies'),
    'freq_spacing': (_parse_choice(*SPACINGS), 'log or linear frequency spacing'),
    'signal_frequency_hz': (_parse_float, 'differential arm modulation frequency (Hz)'),
    'modulation_depth_rad': (_parse_float, 'differential arm phase modulation depth (rad)'),
    'rbw_hz': (_parse_float, 'spectrum analyzer resolution bandwidth (Hz)'),
    'vbw_hz': (_parse_float, 'spectrum analyzer video bandwidth (Hz)'),
    'snl_reference_dbm': (_parse_float, 'absolute shot-noise level on the analyzer (dBm)'),
    'electronic_noise_dbm': (_parse_level, 'electronic noise level on the analyzer (dBm), none for no floor'),
    'scan_points': (int, 'local-oscillator phases in a squeezing scan'),
}

REQUIRED_KEYS = ('input_power_mw', 'dark_port_power_mw', 'cavity_length_m')


@dataclass(frozen=True)
class Scenario:
    """A validated scenario: geometry, detection, squeezing, axis and signal"""

    name: str
    input_power_mw: float
    dark_port_power_mw: float
    cavity_length_m: float
    variant: str = 'prm'
    squeezed: bool = True
    power_mirror_reflectivity: float = 0.0
    power_mirror_loss: float = 0.0
    round_trip_loss: Optional[float] = None
    recycling_gain_target: Optional[float] = None
    arm_efficiency: float = 1.0
    rotator_double_pass_loss: float = 0.0
    squeeze_db: float = 0.0
    squeeze_angle_rad: float = 0.0
    squeeze_reference: str = 'source'
    input_beam_excess_db: float = 0.0
    quantum_efficiency: float = 1.0
    fringe_visibility: float = 1.0
    wavelength_nm: float = 1064.0
    freq_start_hz: Optional[float] = None
    freq_stop_hz: Optional[float] = None
    freq_points: Optional[int] = None
    freq_spacing: str = 'log'
    signal_frequency_hz: float = 5.46e6
    modulation_depth_rad: float = 1e-5
    rbw_hz: float = 100e3
    vbw_hz: float = 30.0
    snl_reference_dbm: float = -82.87
    electronic_noise_dbm: float = float('-inf')
    scan_points: int = 361

    @property
    def points(self) -> int:
        return self.freq_points if self.freq_points is not None else Config.SPECTRUM_POINTS

    @property
    def electronic_noise_rel_snl(self) -> float:
        """Electronic noise as a linear fraction of the SNL (0 when absent)"""
        if self.electronic_noise_dbm == float('-inf'):
            return 0.0
        return float(db_to_linear(self.electronic_noise_dbm - self.snl_reference_dbm))

    def squeeze_spec(self) -> SqueezeSpec:
        return SqueezeSpec(suppression=self.squeeze_db, angle=self.squeeze_angle_rad)

    def homodyne_spec(self) -> HomodyneSpec:
        excess = float(db_to_linear(self.input_beam_excess_db))
        return HomodyneSpec(
            quantum_efficiency=self.quantum_efficiency,
            fringe_visibility=self.fringe_visibility,
            lo_variance=QuadratureCovariance(excess, excess, 0.0),
        )

    def config(self, variant: Optional[str] = None, squeezed: Optional[bool] = None) -> InterferometerConfig:
        """
        Interferometer for one variant of this scenario

        Args:
            variant: 'simple' or 'prm' (default: the scenario's variant)
            squeezed: Inject the squeezed vacuum (default: the scenario's setting)

        Returns:
            InterferometerConfig; the simple Michelson has no power mirror and no cavity loss
        """

        variant = variant or self.variant
        if variant not in VARIANTS:
            raise ValidationError(f"must be one of {VARIANTS} (got {variant!r})", field='variant')
        squeezed = self.squeezed if squeezed is None else squeezed
        recycled = variant == 'prm'

        return InterferometerConfig(
            input_power=self.input_power_mw * 1e-3,
            power_mirror=MirrorSpec(self.power_mirror_reflectivity, self.power_mirror_loss) if recycled else None,
            cavity_length=self.cavity_length_m,
            target_dark_power=self.dark_port_power_mw * 1e-3,
            rotator_double_pass_loss=self.rotator_double_pass_loss,
            arm_efficiency=self.arm_efficiency,
            round_trip_loss=(self.round_trip_loss or 0.0) if recycled else 0.0,
            homodyne=self.homodyne_spec(),
            squeeze=self.squeeze_spec() if squeezed else None,
            squeeze_reference=self.squeeze_reference,
            wavelength=self.wavelength_nm * 1e-9,
        )

    def frequency_axis(self) -> np.ndarray:
        """Spectrum frequencies (Hz), explicit or sized from the power cavity"""
        start, stop = self.freq_start_hz, self.freq_stop_hz
        if start is None or stop is None:
            default_start, default_stop = default_frequency_axis(self)
            start = default_start if start is None else start
            stop = default_stop if stop is None else stop
        if self.freq_spacing == 'log':
            return np.geomspace(start, stop, self.points)
        return np.linspace(start, stop, self.points)


def default_frequency_axis(scenario: Scenario) -> Tuple[float, float]:
    """
    0.01x to 100x the recycled cavity half-linewidth, stopping at the
    anti-resonance FSR/2 so the axis never reaches the next resonance
    """

    if scenario.power_mirror_reflectivity <= 0:
        return FALLBACK_AXIS_HZ

    config = scenario.config('prm', squeezed=False)
    op_point = solve_operating_point(config)
    half = half_linewidth(cavity_spec(config, op_point.fringe_offset))
    stop = min(100.0 * half, free_spectral_range(scenario.cavity_length_m) / 2.0)
    return 0.01 * half, stop


def _validate(scenario: Scenario) -> Scenario:
    """Check every embedded constraint; resolve a gain target into a fitted round-trip loss"""

    for key in REQUIRED_KEYS:
        value = getattr(scenario, key)
        if not np.isfinite(value):
            raise ValidationError(f"must be finite (got {value})", field=key)
    if scenario.round_trip_loss is not None and scenario.recycling_gain_target is not None:
        raise ValidationError("give either round_trip_loss or recycling_gain_target, not both", field='round_trip_loss')

    # dataclass invariants of every embedded type
    scenario.squeeze_spec()
    scenario.homodyne_spec()
    MirrorSpec(scenario.power_mirror_reflectivity, scenario.power_mirror_loss)

    if scenario.recycling_gain_target is not None:
        if scenario.power_mirror_reflectivity <= 0:
            raise ValidationError("needs a power mirror", field='recycling_gain_target')
        fitted = fit_loss_for_gain(scenario.config('prm', squeezed=False), scenario.recycling_gain_target)
        scenario = replace(scenario, round_trip_loss=fitted.round_trip_loss)

    for variant in VARIANTS:
        config = scenario.config(variant)
        ceiling = max_dark_power(config)
        if config.target_dark_power > ceiling * (1 + 1e-12):
            raise ValidationError(
                f"{scenario.dark_port_power_mw} mW not achievable by the {variant} variant "
                f"(maximum {ceiling * 1e3:.6g} mW)",
                field='dark_port_power_mw'
            )

    for key in ('signal_frequency_hz', 'modulation_depth_rad', 'snl_reference_dbm'):
        if not np.isfinite(getattr(scenario, key)):
            raise ValidationError("must be finite", field=key)
    if math.isnan(scenario.electronic_noise_dbm) or scenario.electronic_noise_dbm == float('inf'):
        raise ValidationError("must be a finite level or none", field='electronic_noise_dbm')
    if scenario.modulation_depth_rad < 0:
        raise ValidationError("must be non-negative", field='modulation_depth_rad')
    if not scenario.rbw_hz > 0 or not scenario.vbw_hz > 0:
        raise ValidationError("bandwidths must be positive", field='rbw_hz')
    if scenario.points < 1:
        raise ValidationError(f"must be at least 1 (got {scenario.points})", field='freq_points')
    if scenario.scan_points < 2:
        raise ValidationError(f"must be at least 2 (got {scenario.scan_points})", field='scan_points')

    start, stop = scenario.freq_start_hz, scenario.freq_stop_hz
    for key, value in (('freq_start_hz', start), ('freq_stop_hz', stop)):
        if value is not None and not (np.isfinite(value) and value >= 0):
            raise ValidationError(f"must be a non-negative frequency (got {value})", field=key)
    if start is not None and stop is not None and stop < start:
        raise ValidationError(f"stop {stop} is below start {start}", field='freq_stop_hz')
    if scenario.freq_spacing == 'log' and start is not None and not start > 0:
        raise ValidationError("log spacing needs a positive start frequency", field='freq_start_hz')
    scenario.frequency_axis()

    return scenario


def parse_scenario(text: str, source: str = '<string>') -> Scenario:
    """
    Parse and validate scenario text

    Raises:
        ValidationError: malformed line, unknown or duplicate key, bad value or constraint violation
    """

    values: Dict[str, object] = {}
    for binding in parse_stream(io.StringIO(text)):
        line = binding.original.line
        if binding.error:
            raise ValidationError(f"cannot parse {binding.original.string.strip()!r}", line=line)
        if binding.key is None:
            continue
        key = binding.key.strip().lower()
        if key not in SCHEMA:
            raise ValidationError("unknown key", field=key, line=line)
        if key in values:
            raise ValidationError("duplicate key", field=key, line=line)
        if binding.value is None:
            raise ValidationError("missing value", field=key, line=line)
        parser, _ = SCHEMA[key]
        try:
            values[key] = parser(binding.value)
        except ValueError as e:
            raise ValidationError(str(e), field=key, line=line) from e

    for key in REQUIRED_KEYS:
        if key not in values:
            raise ValidationError("required key missing", field=key)
    values.setdefault('name', Path(source).stem)

    known = {f.name for f in fields(Scenario)}
    scenario = _validate(Scenario(**{k: v for k, v in values.items() if k in known}))
    logger.info(f"Loaded scenario '{scenario.name}' from {source}")
    return scenario


def _resolve(name_or_path: Union[str, Path]) -> Path:
    path = Path(name_or_path)
    if path.suffix == SCENARIO_SUFFIX or path.exists():
        if not path.exists():
            raise ValidationError(f"scenario file not found: {path}", field='scenario')
        return path

    search = []
    if Config.SCENARIO_DIR:
        search.append(Path(Config.SCENARIO_DIR))
    search.append(PRESET_DIR)
    for directory in search:
        candidate = directory / f"{name_or_path}{SCENARIO_SUFFIX}"
        if candidate.exists():
            return candidate
    raise ValidationError(f"unknown preset {str(name_or_path)!r} (known: {', '.join(list_presets())})", field='scenario')


def list_presets() -> list:
    return sorted(p.stem for p in PRESET_DIR.glob(f"*{SCENARIO_SUFFIX}"))


def load_scenario(name_or_path: Union[str, Path]) -> Scenario:
    """
    Load a scenario from a file path or a preset name

    Preset names are looked up in SCENARIO_DIR (if set) and then in the
    built-in presets.
    """

    path = _resolve(name_or_path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e}", field='scenario') from e
    return parse_scenario(text, source=os.fspath(path))
