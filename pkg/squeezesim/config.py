"""Application configuration"""
import os
from dotenv import load_dotenv

load_dotenv()


class Config:
    # Logging
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO').upper()
    JSON_LOGGING = os.getenv('JSON_LOGGING', 'true').lower() == 'true'
    LOG_FILE = os.getenv('LOG_FILE', 'null')

    # Operating-point solver
    SOLVER_XTOL = float(os.getenv('SOLVER_XTOL', '1e-12'))
    SOLVER_MAX_ITER = int(os.getenv('SOLVER_MAX_ITER', '200'))

    # Spectra and output
    SPECTRUM_POINTS = int(os.getenv('SPECTRUM_POINTS', '200'))
    CSV_FLOAT_FORMAT = os.getenv('CSV_FLOAT_FORMAT', '.12g')
    SCENARIO_DIR = os.getenv('SCENARIO_DIR')

    # HTTP surface
    HOST = os.getenv('HOST', '0.0.0.0')
    PORT = int(os.getenv('PORT', 10000))
    CORS_ORIGINS = os.getenv('CORS_ORIGINS', '*')
