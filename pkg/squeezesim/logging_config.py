"""Logging Configuration"""
import logging
import sys

from squeezesim.config import Config
from squeezesim.services.json_logger import setup_json_logging

LEVEL_MAP = {
    'DEBUG': logging.DEBUG,
    'INFO': logging.INFO,
    'WARNING': logging.WARNING,
    'ERROR': logging.ERROR,
    'CRITICAL': logging.CRITICAL
}


def configure_logging(level_name: str = None) -> None:
    """Configure application logging"""

    level = LEVEL_MAP.get((level_name or Config.LOG_LEVEL).upper(), logging.INFO)
    log_file = Config.LOG_FILE if Config.LOG_FILE != 'null' else None

    if Config.JSON_LOGGING:
        setup_json_logging(level=level, log_file=log_file)
    else:
        handlers = [logging.StreamHandler(sys.stderr)]
        if log_file:
            handlers.append(logging.FileHandler(log_file))
        logging.basicConfig(
            level=level,
            format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            handlers=handlers,
            force=True
        )

    logging.getLogger(__name__).debug(f"Logging configured (level: {logging.getLevelName(level)}, json: {Config.JSON_LOGGING})")
