import logging
from dataclasses import replace

import pytest

from squeezesim.services.detection import HomodyneSpec
from squeezesim.services.interferometer import InterferometerConfig
from squeezesim.services.optics import MirrorSpec
from squeezesim.services.quadrature import SqueezeSpec
from squeezesim.services.scenarios import load_scenario

BENCH_HOMODYNE = HomodyneSpec(quantum_efficiency=0.93, fringe_visibility=0.99)


@pytest.fixture(scope='session')
def bench():
    return load_scenario('bench')


@pytest.fixture(scope='session')
def bench_measured():
    return load_scenario('bench-measured')


@pytest.fixture(scope='session')
def aligo():
    return load_scenario('aligo')


@pytest.fixture
def simple_config():
    """20 mW in, 3 mW at the dark port, no power mirror"""
    return InterferometerConfig(
        input_power=20e-3,
        power_mirror=None,
        cavity_length=1.0,
        target_dark_power=3e-3,
        rotator_double_pass_loss=0.15,
        homodyne=BENCH_HOMODYNE,
        squeeze=SqueezeSpec(3.0),
        squeeze_reference='detected',
    )


@pytest.fixture
def prm_config(simple_config):
    """Bench geometry with the 90% power mirror and no round-trip loss yet"""
    return replace(simple_config, power_mirror=MirrorSpec(0.90))


@pytest.fixture(autouse=True)
def restore_logging():
    """configure_logging swaps root handlers; put the originals back after each test"""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
