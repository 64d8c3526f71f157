"""Simulation error types"""
from typing import Optional


class SimulationError(Exception):
    """Base class for simulator failures"""


class ValidationError(SimulationError, ValueError):
    """Invalid input: a precondition, a constraint or a scenario file"""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        prefix = ''
        if line is not None:
            prefix += f"line {line}: "
        if field is not None:
            prefix += f"{field}: "
        super().__init__(prefix + message)

    def to_dict(self) -> dict:
        return {'error': str(self), 'field': self.field, 'line': self.line}


class SolverError(SimulationError, RuntimeError):
    """Operating-point solver did not converge"""
