import logging

import numpy as np
import pytest

from squeezesim.services.detection import (
    HomodyneSpec,
    SpectrumTrace,
    add_powers_dbm,
    homodyne_efficiency,
    scan_squeezing,
    source_variance,
    subtract_electronic_noise,
    synthesize_trace,
)
from squeezesim.services.errors import ValidationError
from squeezesim.services.quadrature import SqueezeSpec, apply_loss, linear_to_db, loss_variance, make_squeezed

BENCH_HOMODYNE = HomodyneSpec(quantum_efficiency=0.93, fringe_visibility=0.99)


@pytest.mark.parametrize('qe, visibility, expected', [(1.0, 1.0, 1.0), (0.93, 0.99, 0.911493), (0.93, 0.0, 0.0)])
def test_homodyne_efficiency(qe, visibility, expected):
    assert homodyne_efficiency(HomodyneSpec(qe, visibility)) == pytest.approx(expected, abs=1e-6)


def test_homodyne_rejects_bad_fractions():
    with pytest.raises(ValidationError):
        HomodyneSpec(quantum_efficiency=1.2)


def test_add_powers_dbm():
    assert add_powers_dbm(-70.0, -np.inf) == pytest.approx(-70.0)
    assert add_powers_dbm(-90.0, -90.0) == pytest.approx(-86.9897, abs=1e-4)
    assert add_powers_dbm(-84.9, -60.0) == pytest.approx(-59.98597, abs=1e-4)
    assert add_powers_dbm(-84.9, -60.0) == pytest.approx(add_powers_dbm(-60.0, -84.9))
    assert add_powers_dbm(-np.inf, -np.inf) == -np.inf


def test_add_powers_dbm_is_increasing():
    levels = np.linspace(-100, -50, 51)
    assert np.all(np.diff(add_powers_dbm(levels, -80.0)) > 0)
    assert np.all(np.diff(add_powers_dbm(-80.0, levels)) > 0)


def test_subtracting_electronic_noise_from_measured_floor():
    # floor 2.3 dB under the SNL, electronics 10.63 dB under it
    assert subtract_electronic_noise(-2.3, -10.63) == pytest.approx(-3.0, abs=0.05)


def test_subtract_inverts_add():
    gaps = np.linspace(0.1, 40.0, 100)
    electronic = -93.5
    totals = add_powers_dbm(electronic + gaps, electronic)
    np.testing.assert_allclose(subtract_electronic_noise(totals, electronic), electronic + gaps, rtol=0, atol=1e-9)


def test_subtracting_negligible_electronics():
    assert subtract_electronic_noise(-60.0, -90.0) == pytest.approx(-60.0043, abs=1e-4)
    assert subtract_electronic_noise(-60.0, -np.inf) == pytest.approx(-60.0)


def test_subtract_rejects_unphysical_total():
    with pytest.raises(ValidationError):
        subtract_electronic_noise(-95.0, -93.5)
    with pytest.raises(ValidationError):
        subtract_electronic_noise(-93.5, -93.5)


def test_source_reference_uses_quoted_value():
    state = source_variance(SqueezeSpec(3.0), BENCH_HOMODYNE, 'source')
    assert state == make_squeezed(SqueezeSpec(3.0))


def test_detected_reference_back_propagates_through_detection():
    state = source_variance(SqueezeSpec(3.5), BENCH_HOMODYNE, 'detected')
    assert state.is_pure
    detected = apply_loss(state, homodyne_efficiency(BENCH_HOMODYNE))
    assert detected.v_plus == pytest.approx(10 ** -0.35, abs=1e-12)


def test_detected_reference_rejects_impossible_squeezing():
    with pytest.raises(ValidationError):
        source_variance(SqueezeSpec(10.0), HomodyneSpec(quantum_efficiency=0.5), 'detected')
    with pytest.raises(ValidationError):
        source_variance(SqueezeSpec(3.0), BENCH_HOMODYNE, 'at-the-moon')


def test_scan_reaches_quoted_squeezing_and_anti_squeezing():
    phases = np.linspace(0, np.pi, 181)
    variances = scan_squeezing(SqueezeSpec(3.5), BENCH_HOMODYNE, phases, 'detected')
    assert linear_to_db(variances.min()) == pytest.approx(-3.5, abs=1e-9)
    assert np.argmin(variances) in (0, 180)

    source = source_variance(SqueezeSpec(3.5), BENCH_HOMODYNE, 'detected')
    expected_max = loss_variance(source.v_minus, homodyne_efficiency(BENCH_HOMODYNE))
    assert variances.max() == pytest.approx(expected_max, rel=1e-9)
    assert np.argmax(variances) == 90


def test_loss_stages_commute():
    v = 0.3
    for a, b in [(0.85, 0.911493), (0.5, 0.99)]:
        assert loss_variance(loss_variance(v, a), b) == pytest.approx(loss_variance(loss_variance(v, b), a), abs=1e-15)


def test_flat_trace_without_electronics():
    frequencies = np.linspace(1e6, 10e6, 10)
    trace = synthesize_trace(frequencies, np.zeros(10), snl_ref=-82.87)
    np.testing.assert_allclose(trace.levels, -82.87)
    np.testing.assert_allclose(trace.frequencies, frequencies)
    assert trace.rbw == 100e3
    assert trace.vbw == 30.0


def test_trace_floor_with_electronics():
    frequencies = np.linspace(20e6, 70e6, 5)
    v_pd_db = np.full(5, linear_to_db(0.53105))
    trace = synthesize_trace(frequencies, v_pd_db, snl_ref=-82.87, electronic_floor=-93.5)
    floor = trace.levels - (-82.87)
    np.testing.assert_allclose(floor, -2.3, atol=0.3)


def test_signal_peak_gap_for_fourfold_signal():
    frequencies = np.linspace(5e6, 6e6, 101)
    noise = np.full(101, -40.0)
    small = synthesize_trace(frequencies, noise, snl_ref=-82.87, signal=(5.46e6, -50.0))
    large = synthesize_trace(frequencies, noise, snl_ref=-82.87, signal=(5.46e6, -50.0 + 10 * np.log10(4)))
    peak = int(np.argmin(np.abs(frequencies - 5.46e6)))
    assert large.levels[peak] - small.levels[peak] == pytest.approx(6.02, abs=0.01)
    assert small.levels[peak] > small.levels[peak - 1]


def test_signal_outside_span_is_skipped(caplog):
    frequencies = np.linspace(1e6, 2e6, 11)
    with caplog.at_level(logging.WARNING):
        trace = synthesize_trace(frequencies, np.zeros(11), snl_ref=-80.0, signal=(5.46e6, -20.0))
    np.testing.assert_allclose(trace.levels, -80.0)
    assert 'outside the trace span' in caplog.text
    record = caplog.records[-1]
    assert record.status == 'signal_skipped'
    assert record.points == 11


def test_trace_validation():
    with pytest.raises(ValidationError):
        synthesize_trace([1e6, 2e6], [0.0], snl_ref=-80.0)
    with pytest.raises(ValidationError):
        SpectrumTrace(points=[(1e6, -80.0)], rbw=0.0, vbw=30.0, reference_snl=-80.0, electronic_floor=-90.0)
    with pytest.raises(ValidationError):
        SpectrumTrace(points=[(1e6, float('nan'))], rbw=1e3, vbw=30.0, reference_snl=-80.0, electronic_floor=-90.0)
