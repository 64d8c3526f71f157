"""
Scenario runs

Each run_* function takes a loaded Scenario, evaluates the model and
returns a Table that can be written as CSV or served as JSON.
"""
import csv
import logging
import time
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO

import numpy as np

from squeezesim.config import Config
from squeezesim.services.detection import scan_squeezing, synthesize_trace
from squeezesim.services.errors import SimulationError, ValidationError
from squeezesim.services.interferometer import (
    detected_variance,
    noise_floor,
    noise_spectrum,
    signal_response,
    signal_to_shot_noise_db,
    snr_improvement,
    solve_operating_point,
)
from squeezesim.services.json_logger import StructuredLogger
from squeezesim.services.quadrature import SqueezeSpec, linear_to_db
from squeezesim.services.scenarios import VARIANTS, Scenario

logger = logging.getLogger(__name__)
run_logger = StructuredLogger(__name__)

SPECTRUM_COLUMNS = ['frequency_hz', 'v_pd_linear', 'v_pd_db', 't_lo_sq', 't_sqz_sq', 't_vac_sq_total']
OPERATING_POINT_COLUMNS = [
    'variant', 'fringe_offset_rad', 'effective_reflectivity', 'recycling_gain',
    'circulating_power_w', 'dark_port_power_w', 'round_trip_loss',
]
SNR_COLUMNS = [
    'variant', 'signal_frequency_hz', 'signal_power_w', 'signal_rel_snl_db', 'signal_vs_simple_db',
    'noise_at_signal_db', 'noise_floor_db', 'noise_floor_with_electronics_db',
    'snr_gain_db', 'snr_gain_with_electronics_db',
]
TRACE_COLUMNS = ['frequency_hz', 'level_dbm']
SCAN_COLUMNS = ['lo_phase_rad', 'variance_linear', 'variance_db']


@dataclass
class Table:
    """Named columns and rows, ordered as written"""

    columns: List[str]
    rows: List[Sequence[Any]]

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        index = self.columns.index(name)
        return np.array([row[index] for row in self.rows])

    def to_dicts(self) -> List[Dict[str, Any]]:
        return [dict(zip(self.columns, row)) for row in self.rows]

    def write_csv(self, stream: TextIO, float_format: Optional[str] = None) -> None:
        """Header row, comma delimiter, LF line endings"""
        float_format = float_format or Config.CSV_FLOAT_FORMAT
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format(value, float_format) if isinstance(value, float) else value for value in row])


def _timed(name: str, scenario: Scenario, variant: Optional[str], squeezed: Optional[bool], run):
    start_time = time.time()
    try:
        table = run()
    except SimulationError as e:
        run_logger.error(
            f"❌ {name} failed: {e}",
            scenario=scenario.name,
            variant=variant,
            squeezed=squeezed,
            execution_ms=int((time.time() - start_time) * 1000),
            status='failed',
        )
        raise
    run_logger.info(
        f"✅ {name} complete",
        scenario=scenario.name,
        variant=variant,
        squeezed=squeezed,
        points=len(table),
        execution_ms=int((time.time() - start_time) * 1000),
        status='completed',
    )
    return table


def run_spectrum(scenario: Scenario, variant: Optional[str] = None, squeezed: Optional[bool] = None) -> Table:
    """Detected variance over the scenario's frequency axis"""

    variant = variant or scenario.variant
    squeezed = scenario.squeezed if squeezed is None else squeezed

    def run() -> Table:
        spectrum = noise_spectrum(scenario.config(variant, squeezed), scenario.frequency_axis())
        rows = [
            (float(f), float(v), float(v_db), float(lo), float(sqz), float(vac))
            for f, v, v_db, lo, sqz, vac in zip(
                spectrum.frequencies, spectrum.v_pd, spectrum.v_pd_db,
                spectrum.t_lo_sq, spectrum.t_sqz_sq, spectrum.t_vac_sq_total,
            )
        ]
        return Table(SPECTRUM_COLUMNS, rows)

    return _timed('Spectrum', scenario, variant, squeezed, run)


def run_operating_point(scenario: Scenario, variant: Optional[str] = None) -> Table:
    """Solved operating point for one variant, or for both when none is given"""

    variants = [variant] if variant else list(VARIANTS)

    def run() -> Table:
        rows = []
        for name in variants:
            config = scenario.config(name, squeezed=False)
            values = solve_operating_point(config).to_dict()
            values.update(variant=name, round_trip_loss=config.round_trip_loss)
            rows.append(tuple(
                value if column == 'variant' else float(value)
                for column, value in ((c, values[c]) for c in OPERATING_POINT_COLUMNS)
            ))
        return Table(OPERATING_POINT_COLUMNS, rows)

    return _timed('Operating point', scenario, variant, None, run)


def _with_electronics(variance: float, electronic: float) -> float:
    return float(linear_to_db(variance + electronic))


def run_snr(scenario: Scenario, variant: Optional[str] = None) -> Table:
    """
    Signal level, noise floor and squeezing SNR gain per variant

    Noise floors are quoted at the anti-resonance plateau; the SNR gain is
    taken at the signal frequency, with and without the scenario's
    electronic noise added to both the squeezed and unsqueezed noise.
    """

    variants = [variant] if variant else list(VARIANTS)
    frequency = scenario.signal_frequency_hz
    depth = scenario.modulation_depth_rad
    electronic = scenario.electronic_noise_rel_snl

    def signal_power(name: str) -> float:
        config = scenario.config(name, squeezed=False)
        return signal_response(config, solve_operating_point(config), frequency, depth)

    def run() -> Table:
        simple_signal = signal_power('simple')
        rows = []
        for name in variants:
            squeezed_config = scenario.config(name, squeezed=True)
            plain_config = scenario.config(name, squeezed=False)
            point = solve_operating_point(squeezed_config)

            power = signal_response(squeezed_config, point, frequency, depth)
            floor = noise_floor(squeezed_config, point)
            at_signal = detected_variance(squeezed_config, point, frequency)
            vs_simple = 10.0 * np.log10(power / simple_signal) if power > 0 and simple_signal > 0 else float('nan')

            rows.append((
                name,
                float(frequency),
                float(power),
                signal_to_shot_noise_db(squeezed_config, point, frequency, depth, scenario.rbw_hz),
                float(vs_simple),
                float(linear_to_db(at_signal)),
                float(linear_to_db(floor)),
                _with_electronics(floor, electronic),
                snr_improvement(squeezed_config, plain_config, frequency),
                snr_improvement(squeezed_config, plain_config, frequency, electronic_noise=electronic),
            ))
        return Table(SNR_COLUMNS, rows)

    return _timed('SNR', scenario, variant, True, run)


def run_trace(scenario: Scenario, variant: Optional[str] = None, squeezed: Optional[bool] = None) -> Table:
    """Spectrum-analyzer trace in dBm with electronic noise and the signal peak"""

    variant = variant or scenario.variant
    squeezed = scenario.squeezed if squeezed is None else squeezed

    def run() -> Table:
        config = scenario.config(variant, squeezed)
        point = solve_operating_point(config)
        spectrum = noise_spectrum(config, scenario.frequency_axis(), point)

        signal = None
        if scenario.modulation_depth_rad > 0:
            level = scenario.snl_reference_dbm + signal_to_shot_noise_db(
                config, point, scenario.signal_frequency_hz, scenario.modulation_depth_rad, scenario.rbw_hz
            )
            signal = (scenario.signal_frequency_hz, level)

        trace = synthesize_trace(
            spectrum.frequencies,
            spectrum.v_pd_db,
            snl_ref=scenario.snl_reference_dbm,
            electronic_floor=scenario.electronic_noise_dbm,
            rbw=scenario.rbw_hz,
            vbw=scenario.vbw_hz,
            signal=signal,
        )
        return Table(TRACE_COLUMNS, [(float(f), float(level)) for f, level in trace.points])

    return _timed('Trace', scenario, variant, squeezed, run)


def run_scan(scenario: Scenario, squeezed: Optional[bool] = None) -> Table:
    """Squeezed beam on the homodyne alone while the local-oscillator phase sweeps one full turn"""

    squeezed = scenario.squeezed if squeezed is None else squeezed

    def run() -> Table:
        squeeze = scenario.squeeze_spec() if squeezed else SqueezeSpec(0.0)
        phases = np.linspace(0.0, 2.0 * np.pi, scenario.scan_points)
        variances = scan_squeezing(squeeze, scenario.homodyne_spec(), phases, scenario.squeeze_reference)
        levels = linear_to_db(variances)
        return Table(SCAN_COLUMNS, [(float(p), float(v), float(d)) for p, v, d in zip(phases, variances, levels)])

    return _timed('Scan', scenario, None, squeezed, run)


# command -> run(scenario, variant, squeezed)
RUNS: Dict[str, Callable[[Scenario, Optional[str], Optional[bool]], Table]] = {
    'spectrum': run_spectrum,
    'operating-point': lambda scenario, variant, squeezed: run_operating_point(scenario, variant),
    'snr': lambda scenario, variant, squeezed: run_snr(scenario, variant),
    'trace': run_trace,
    'scan': lambda scenario, variant, squeezed: run_scan(scenario, squeezed),
}


def dispatch(command: str, scenario: Scenario, variant: Optional[str] = None, squeezed: Optional[bool] = None) -> Table:
    """Run a named command; variant and squeezed are ignored by commands that do not take them"""
    if command not in RUNS:
        raise ValidationError(f"unknown command {command!r}", field='command')
    return RUNS[command](scenario, variant, squeezed)
