"""
Quadrature noise algebra

Variances are normalised so that vacuum = 1 (the shot-noise limit, SNL).
dB values are 10*log10 of a variance ratio.
"""
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from squeezesim.services.errors import ValidationError

logger = logging.getLogger(__name__)

# dB relative to the SNL (0 dB = SNL)
NoiseVarianceDb = float

ArrayLike = Union[float, np.ndarray]

HEISENBERG_TOL = 1e-9


@dataclass(frozen=True)
class QuadratureCovariance:
    """Symmetric 2x2 quadrature covariance (amplitude, phase)"""

    v_plus: float
    v_minus: float
    correlation: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.v_plus) and np.isfinite(self.v_minus) and np.isfinite(self.correlation)):
            raise ValidationError("covariance entries must be finite", field='covariance')
        if self.v_plus <= 0 or self.v_minus <= 0:
            raise ValidationError(
                f"variances must be positive (got {self.v_plus}, {self.v_minus})", field='covariance'
            )
        if self.determinant < 1 - self._tolerance:
            raise ValidationError(
                f"violates the Heisenberg bound (det = {self.determinant:.6g} < 1)", field='covariance'
            )

    @classmethod
    def vacuum(cls) -> 'QuadratureCovariance':
        return cls(1.0, 1.0, 0.0)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.v_plus, self.correlation], [self.correlation, self.v_minus]])

    @property
    def determinant(self) -> float:
        return self.v_plus * self.v_minus - self.correlation ** 2

    @property
    def _tolerance(self) -> float:
        # relative to the product of the variances, which sets the rounding error of the determinant
        return HEISENBERG_TOL * max(1.0, self.v_plus * self.v_minus)

    @property
    def is_pure(self) -> bool:
        return abs(self.determinant - 1) < self._tolerance


@dataclass(frozen=True)
class SqueezeSpec:
    """Squeezing magnitude (dB below SNL) and squeeze-quadrature angle (rad)"""

    suppression: float
    angle: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.suppression) or self.suppression < 0:
            raise ValidationError(
                f"squeezing must be a non-negative number of dB (got {self.suppression})", field='squeeze_db'
            )
        if not np.isfinite(self.angle):
            raise ValidationError(f"squeeze angle must be finite (got {self.angle})", field='squeeze_angle_rad')


def db_to_linear(x: Union[NoiseVarianceDb, np.ndarray]) -> ArrayLike:
    """Convert dB relative to the SNL into a variance ratio"""
    return np.power(10.0, np.asarray(x, dtype=float) / 10.0)


def linear_to_db(v: ArrayLike) -> Union[NoiseVarianceDb, np.ndarray]:
    """Convert a variance ratio into dB relative to the SNL"""
    values = np.asarray(v, dtype=float)
    if np.any(~(values > 0)):
        raise ValidationError(f"variance ratio must be positive (got {v})", field='variance')
    return 10.0 * np.log10(values)


def _check_efficiency(efficiency: float, field: str = 'efficiency') -> None:
    if not 0.0 <= efficiency <= 1.0:
        raise ValidationError(f"must lie in [0, 1] (got {efficiency})", field=field)


def apply_loss(state: QuadratureCovariance, efficiency: float) -> QuadratureCovariance:
    """
    Pass a state through a beamsplitter of transmission `efficiency`,
    admixing unit-variance vacuum

    Args:
        state: Input covariance
        efficiency: Power transmission in [0, 1]

    Returns:
        Degraded covariance
    """

    _check_efficiency(efficiency)
    return QuadratureCovariance(
        efficiency * state.v_plus + (1 - efficiency),
        efficiency * state.v_minus + (1 - efficiency),
        efficiency * state.correlation,
    )


def loss_variance(variance: ArrayLike, efficiency: float) -> ArrayLike:
    """Scalar form of apply_loss for a single measured variance"""
    _check_efficiency(efficiency)
    return efficiency * variance + (1 - efficiency)


def rotation(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def make_squeezed(spec: SqueezeSpec) -> QuadratureCovariance:
    """
    Pure minimum-uncertainty squeezed state

    The squeezed quadrature sits at `spec.angle` from the measurement
    quadrature; at angle 0 v_plus is the squeezed variance.
    """

    squeezed = 10.0 ** (-spec.suppression / 10.0)
    anti = 1.0 / squeezed
    c, s = np.cos(spec.angle), np.sin(spec.angle)
    # R diag(squeezed, anti) R^T written out so both variances are sums of positive terms
    return QuadratureCovariance(
        float(squeezed * c * c + anti * s * s),
        float(squeezed * s * s + anti * c * c),
        float((squeezed - anti) * s * c),
    )


def measured_variance(state: QuadratureCovariance, angle: ArrayLike) -> ArrayLike:
    """Variance of the quadrature at homodyne angle `angle` (rad)"""
    c, s = np.cos(angle), np.sin(angle)
    return c * c * state.v_plus + s * s * state.v_minus + 2 * s * c * state.correlation
