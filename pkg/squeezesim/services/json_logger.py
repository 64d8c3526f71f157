"""JSON Structured Logging"""
import json
import logging
import sys
from datetime import datetime, timezone
from typing import Optional

# Extra fields copied from the log record when present
RUN_FIELDS = ('scenario', 'variant', 'squeezed', 'points', 'execution_ms', 'status')


class JSONFormatter(logging.Formatter):
    """Format logs as JSON for structured logging"""

    def format(self, record: logging.LogRecord) -> str:
        """
        Format log record as JSON

        Args:
            record: Log record

        Returns:
            JSON formatted log string
        """

        log_data = {
            'timestamp': datetime.now(timezone.utc).isoformat().replace('+00:00', 'Z'),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
        }

        log_data['source'] = {
            'file': record.pathname,
            'line': record.lineno,
            'function': record.funcName
        }

        if record.exc_info:
            log_data['exception'] = {
                'type': record.exc_info[0].__name__ if record.exc_info[0] else None,
                'message': str(record.exc_info[1]) if record.exc_info[1] else None,
                'traceback': self.formatException(record.exc_info)
            }

        for name in RUN_FIELDS:
            value = getattr(record, name, None)
            if value is not None:
                log_data[name] = value

        return json.dumps(log_data)


def setup_json_logging(
    level: int = logging.INFO,
    log_file: Optional[str] = None
) -> None:
    """
    Setup JSON structured logging on standard error

    Args:
        level: Logging level
        log_file: Optional log file path
    """

    json_formatter = JSONFormatter()

    # stdout is reserved for CSV output
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(json_formatter)
    console_handler.setLevel(level)

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
    root_logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(json_formatter)
        file_handler.setLevel(level)
        root_logger.addHandler(file_handler)


class StructuredLogger:
    """Helper for structured logging with consistent run fields"""

    def __init__(self, name: str):
        self.logger = logging.getLogger(name)

    def log_run(
        self,
        level: int,
        message: str,
        scenario: Optional[str] = None,
        variant: Optional[str] = None,
        squeezed: Optional[bool] = None,
        points: Optional[int] = None,
        execution_ms: Optional[int] = None,
        status: Optional[str] = None,
    ) -> None:
        """
        Log a scenario run event

        Args:
            level: Log level
            message: Log message
            scenario: Scenario name
            variant: 'simple' or 'prm'
            squeezed: Whether squeezing is injected
            points: Number of frequency points evaluated
            execution_ms: Execution time in milliseconds
            status: Run status
        """

        extra = {
            'scenario': scenario,
            'variant': variant,
            'squeezed': squeezed,
            'points': points,
            'execution_ms': execution_ms,
            'status': status,
        }

        self.logger.log(level, message, extra=extra)

    def info(self, message: str, **kwargs) -> None:
        """Log info message"""
        self.log_run(logging.INFO, message, **kwargs)

    def warning(self, message: str, **kwargs) -> None:
        """Log warning message"""
        self.log_run(logging.WARNING, message, **kwargs)

    def error(self, message: str, **kwargs) -> None:
        """Log error message"""
        self.log_run(logging.ERROR, message, **kwargs)
