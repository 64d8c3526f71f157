import io

import numpy as np
import pytest

from squeezesim.runner import (
    RUNS,
    SNR_COLUMNS,
    SPECTRUM_COLUMNS,
    dispatch,
    run_operating_point,
    run_scan,
    run_snr,
    run_spectrum,
    run_trace,
)
from squeezesim.services.errors import ValidationError
from squeezesim.services.interferometer import cavity_spec, noise_spectrum, solve_operating_point
from squeezesim.services.optics import cavity_linewidth, half_linewidth
from squeezesim.services.scenarios import parse_scenario


def csv_text(table):
    buffer = io.StringIO()
    table.write_csv(buffer)
    return buffer.getvalue()


def full_linewidth(scenario):
    config = scenario.config('prm')
    return cavity_linewidth(cavity_spec(config, solve_operating_point(config).fringe_offset))


def test_spectrum_columns(bench):
    table = run_spectrum(bench)
    assert table.columns == SPECTRUM_COLUMNS
    assert len(table) == bench.points


def test_spectrum_csv_is_deterministic(bench):
    first = csv_text(run_spectrum(bench, 'prm', True))
    second = csv_text(run_spectrum(bench, 'prm', True))
    assert first == second
    assert first.startswith(','.join(SPECTRUM_COLUMNS) + '\n')
    assert '\r' not in first


@pytest.mark.parametrize('variant', ['simple', 'prm'])
def test_unsqueezed_spectra_sit_at_shot_noise(bench, variant):
    table = run_spectrum(bench, variant, squeezed=False)
    np.testing.assert_allclose(table.column('v_pd_db'), 0.0, rtol=0, atol=1e-12)


def test_spectrum_family_shape(bench):
    frequency = run_spectrum(bench, 'prm', True).column('frequency_hz')
    recycled = run_spectrum(bench, 'prm', True).column('v_pd_db')
    simple = run_spectrum(bench, 'simple', True).column('v_pd_db')
    outside = frequency >= full_linewidth(bench)
    assert outside.sum() > 10

    # recycled trace at or below the simple one beyond the full linewidth
    assert np.all(recycled[outside] <= simple[outside])
    # suppression keeps improving with frequency beyond the linewidth
    assert np.all(np.diff(recycled[outside]) <= 1e-12)
    # both flatten out at the top of the band
    assert abs(recycled[-1] - recycled[-2]) < 0.01
    assert abs(simple[-1] - simple[-2]) < 1e-9


def test_recycled_excess_between_half_and_full_linewidth(bench):
    recycled = bench.config('prm', True)
    simple = bench.config('simple', True)
    point = solve_operating_point(recycled)
    hwhm = half_linewidth(cavity_spec(recycled, point.fringe_offset))
    assert hwhm == pytest.approx(4.111e6, rel=1e-3)

    frequency = np.linspace(hwhm, 75e6, 4000)
    excess = noise_spectrum(recycled, frequency).v_pd_db - noise_spectrum(simple, frequency).v_pd_db
    above = frequency[excess > 0]
    # the recycled trace sits slightly above the simple one from the half linewidth to ~5.26 MHz
    assert above.min() == pytest.approx(hwhm)
    assert above.max() == pytest.approx(5.263e6, abs=3e4)
    assert excess.max() == pytest.approx(0.136, abs=0.01)
    assert np.all(excess[frequency >= 2 * hwhm] <= 0)


def test_aligo_spectrum_approaches_loss_degraded_floor(aligo):
    top = run_spectrum(aligo).column('v_pd_db')[-1]
    oracle = 10 * np.log10(0.95 * 0.1 + 0.05)
    assert oracle <= top <= oracle + 1.0


def test_operating_points(bench):
    rows = {row['variant']: row for row in run_operating_point(bench).to_dicts()}
    assert rows['simple']['effective_reflectivity'] == pytest.approx(0.922, abs=5e-3)
    assert rows['simple']['recycling_gain'] == pytest.approx(1.0)
    assert rows['prm']['recycling_gain'] == pytest.approx(4.0, rel=1e-6)
    assert 0.98 <= rows['prm']['effective_reflectivity'] <= 0.995
    assert rows['prm']['dark_port_power_w'] == pytest.approx(3e-3, rel=1e-9)


def test_operating_point_single_variant(bench):
    table = run_operating_point(bench, 'prm')
    assert table.column('variant').tolist() == ['prm']


def test_zero_dark_target_gives_dark_fringe():
    scenario = parse_scenario(
        "input_power_mw = 20\ndark_port_power_mw = 0\ncavity_length_m = 1\npower_mirror_reflectivity = 0.9\n"
    )
    np.testing.assert_array_equal(run_operating_point(scenario).column('fringe_offset_rad'), [0.0, 0.0])


def test_snr_bench(bench):
    table = run_snr(bench)
    assert table.columns == SNR_COLUMNS
    rows = {row['variant']: row for row in table.to_dicts()}
    assert 1.6 <= rows['simple']['snr_gain_db'] <= 2.8
    assert rows['prm']['signal_vs_simple_db'] == pytest.approx(6.0, abs=0.1)
    assert rows['simple']['signal_vs_simple_db'] == pytest.approx(0.0)
    # at 5.46 MHz the cavity still passes part of the squeezed field to its loss ports
    assert rows['prm']['snr_gain_db'] == pytest.approx(1.960, abs=0.005)
    assert rows['prm']['noise_floor_db'] == pytest.approx(-2.387, abs=0.005)


def test_snr_bench_measured(bench_measured):
    rows = {row['variant']: row for row in run_snr(bench_measured).to_dicts()}
    assert 1.6 <= rows['simple']['snr_gain_db'] <= 2.8
    assert rows['prm']['snr_gain_db'] == pytest.approx(2.239, abs=0.005)
    assert rows['prm']['noise_floor_db'] == pytest.approx(-2.749, abs=0.005)
    # floor without electronics against the electronics-corrected measurement
    assert 2.4 <= -rows['prm']['noise_floor_db'] <= 3.0
    # floor with electronics against the raw measurement
    assert -rows['prm']['noise_floor_with_electronics_db'] == pytest.approx(2.3, abs=0.3)
    assert rows['prm']['snr_gain_with_electronics_db'] < rows['prm']['snr_gain_db']


def test_trace_floor_and_signal(bench_measured):
    table = run_trace(bench_measured, 'prm', True)
    frequency = table.column('frequency_hz')
    level = table.column('level_dbm')
    assert level[-1] - bench_measured.snl_reference_dbm == pytest.approx(-2.3, abs=0.3)

    peak = int(np.argmin(np.abs(frequency - bench_measured.signal_frequency_hz)))
    assert level[peak] > level[peak - 1]
    assert level[peak] > level[peak + 1]


def test_trace_signal_gap_between_variants(bench_measured):
    def peak_level(variant):
        table = run_trace(bench_measured, variant, False)
        frequency = table.column('frequency_hz')
        return table.column('level_dbm')[int(np.argmin(np.abs(frequency - bench_measured.signal_frequency_hz)))]

    assert peak_level('prm') - peak_level('simple') == pytest.approx(6.0, abs=0.15)


def test_unsqueezed_trace_without_signal_is_flat(bench):
    scenario = parse_scenario(
        "input_power_mw = 20\ndark_port_power_mw = 3\ncavity_length_m = 1\npower_mirror_reflectivity = 0.9\n"
        "modulation_depth_rad = 0\nsnl_reference_dbm = -80\n"
    )
    np.testing.assert_allclose(run_trace(scenario, squeezed=False).column('level_dbm'), -80.0)


def test_scan(bench_measured):
    table = run_scan(bench_measured)
    assert len(table) == bench_measured.scan_points
    assert table.column('variance_db').min() == pytest.approx(-3.5, abs=1e-9)
    assert table.column('variance_db').max() > 3.5

    flat = run_scan(bench_measured, squeezed=False)
    np.testing.assert_allclose(flat.column('variance_linear'), 1.0)


def test_dispatch_matches_direct_runs(bench):
    assert dispatch('operating-point', bench, 'prm').to_dicts() == run_operating_point(bench, 'prm').to_dicts()
    assert dispatch('scan', bench, 'simple', False).to_dicts() == run_scan(bench, False).to_dicts()
    assert set(RUNS) == {'spectrum', 'operating-point', 'snr', 'trace', 'scan'}


def test_dispatch_rejects_unknown_command(bench):
    with pytest.raises(ValidationError) as excinfo:
        dispatch('waterfall', bench)
    assert excinfo.value.field == 'command'
