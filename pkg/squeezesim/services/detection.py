"""
Homodyne detection and spectrum-analyzer trace synthesis

Trace levels are deterministic expected levels: the model variance is
placed relative to an absolute SNL level in dBm and the electronic noise
floor is power-added on top. RBW and VBW are carried as metadata only.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from squeezesim.services.errors import ValidationError
from squeezesim.services.json_logger import StructuredLogger
from squeezesim.services.quadrature import (
    QuadratureCovariance,
    SqueezeSpec,
    loss_variance,
    make_squeezed,
    measured_variance,
)

logger = logging.getLogger(__name__)
trace_logger = StructuredLogger(__name__)

LN10_OVER_10 = np.log(10.0) / 10.0

SQUEEZE_REFERENCES = ('source', 'detected')


@dataclass(frozen=True)
class HomodyneSpec:
    """Detector quantum efficiency, mode-overlap visibility and local-oscillator noise"""

    quantum_efficiency: float = 1.0
    fringe_visibility: float = 1.0
    lo_variance: QuadratureCovariance = field(default_factory=QuadratureCovariance.vacuum)

    def __post_init__(self):
        for name in ('quantum_efficiency', 'fringe_visibility'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"must lie in [0, 1] (got {value})", field=name)


@dataclass(frozen=True)
class SpectrumTrace:
    """Spectrum-analyzer style trace: (frequency Hz, level dBm) points plus context"""

    points: List[Tuple[float, float]]
    rbw: float
    vbw: float
    reference_snl: float
    electronic_floor: float

    def __post_init__(self):
        if not self.rbw > 0:
            raise ValidationError(f"must be positive (got {self.rbw})", field='rbw_hz')
        if any(not np.isfinite(level) for _, level in self.points):
            raise ValidationError("trace levels must be finite", field='points')

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([f for f, _ in self.points])

    @property
    def levels(self) -> np.ndarray:
        return np.array([level for _, level in self.points])


def homodyne_efficiency(spec: HomodyneSpec) -> float:
    """Detection efficiency: quantum efficiency x visibility^2"""
    return spec.quantum_efficiency * spec.fringe_visibility ** 2


def source_variance(
    squeeze: SqueezeSpec,
    homodyne: HomodyneSpec,
    reference: str = 'source'
) -> QuadratureCovariance:
    """
    Squeezed state at the source

    Args:
        squeeze: Quoted squeezing
        homodyne: Detector used to quote it
        reference: 'source' takes the quoted value as the source state;
            'detected' treats it as what this homodyne measured directly and
            back-propagates through the detection efficiency

    Returns:
        Pure squeezed covariance at the source
    """

    if reference not in SQUEEZE_REFERENCES:
        raise ValidationError(f"must be one of {SQUEEZE_REFERENCES} (got {reference!r})", field='squeeze_reference')

    if reference == 'source':
        return make_squeezed(squeeze)

    efficiency = homodyne_efficiency(homodyne)
    detected = 10.0 ** (-squeeze.suppression / 10.0)
    at_source = 1.0 - (1.0 - detected) / efficiency if efficiency > 0 else 0.0
    if at_source <= 0:
        raise ValidationError(
            f"{squeeze.suppression} dB cannot be detected with efficiency {efficiency:.4g}",
            field='squeeze_db'
        )
    source = SqueezeSpec(suppression=-10.0 * np.log10(at_source), angle=squeeze.angle)
    logger.debug(f"Detected {squeeze.suppression} dB -> {source.suppression:.4f} dB at source")
    return make_squeezed(source)


def scan_squeezing(
    squeeze: SqueezeSpec,
    homodyne: HomodyneSpec,
    lo_phases: Sequence[float],
    reference: str = 'source'
) -> np.ndarray:
    """
    Squeezed beam measured directly by the homodyne while the local
    oscillator phase is swept

    Returns:
        Measured variance (rel. SNL) at each LO phase
    """

    state = source_variance(squeeze, homodyne, reference)
    return loss_variance(measured_variance(state, np.asarray(lo_phases, dtype=float)), homodyne_efficiency(homodyne))


def add_powers_dbm(a, b):
    """Incoherent sum of two powers given in dBm"""
    total = np.logaddexp(np.asarray(a, dtype=float) * LN10_OVER_10, np.asarray(b, dtype=float) * LN10_OVER_10)
    return total / LN10_OVER_10


def subtract_electronic_noise(total, electronic):
    """
    Remove an electronic noise contribution from a measured level (dBm)

    Raises:
        ValidationError: if the total does not exceed the electronic noise
    """

    total = np.asarray(total, dtype=float)
    electronic = np.asarray(electronic, dtype=float)
    if np.any(total <= electronic):
        raise ValidationError(
            f"total ({total}) must exceed the electronic noise ({electronic})", field='electronic_noise_dbm'
        )
    return total + 10.0 * np.log10(-np.expm1((electronic - total) * LN10_OVER_10))


def synthesize_trace(
    frequencies: Sequence[float],
    v_pd_db: Sequence[float],
    snl_ref: float,
    electronic_floor: float = -np.inf,
    rbw: float = 100e3,
    vbw: float = 30.0,
    signal: Optional[Tuple[float, float]] = None
) -> SpectrumTrace:
    """
    Build a spectrum-analyzer trace from a model spectrum

    Args:
        frequencies: Frequency axis (Hz)
        v_pd_db: Model variance at each frequency (dB rel. SNL)
        snl_ref: Absolute SNL level (dBm)
        electronic_floor: Electronic noise level (dBm), -inf for none
        rbw: Resolution bandwidth (Hz)
        vbw: Video bandwidth (Hz)
        signal: Optional (frequency Hz, level dBm) peak added at its nearest bin

    Returns:
        SpectrumTrace
    """

    frequencies = np.asarray(frequencies, dtype=float)
    v_pd_db = np.asarray(v_pd_db, dtype=float)
    if frequencies.shape != v_pd_db.shape or frequencies.size == 0:
        raise ValidationError("frequency axis and spectrum must be non-empty and the same length", field='points')

    levels = add_powers_dbm(snl_ref + v_pd_db, electronic_floor)

    if signal is not None:
        signal_frequency, signal_dbm = signal
        if frequencies.min() <= signal_frequency <= frequencies.max():
            index = int(np.argmin(np.abs(frequencies - signal_frequency)))
            levels[index] = add_powers_dbm(levels[index], signal_dbm)
        else:
            trace_logger.warning(
                f"Signal at {signal_frequency:.6g} Hz lies outside the trace span, not added",
                points=int(frequencies.size),
                status='signal_skipped',
            )

    return SpectrumTrace(
        points=list(zip(frequencies.tolist(), levels.tolist())),
        rbw=rbw,
        vbw=vbw,
        reference_snl=snl_ref,
        electronic_floor=electronic_floor,
    )
