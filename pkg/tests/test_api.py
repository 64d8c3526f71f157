import pytest

from squeezesim.config import Config

import app as api


@pytest.fixture
def client():
    api.app.config['TESTING'] = True
    with api.app.test_client() as client:
        yield client


def test_health(client):
    response = client.get('/')
    assert response.status_code == 200
    assert response.get_json()['status'] == 'healthy'
    assert client.get('/health').status_code == 200


def test_presets(client):
    assert 'bench' in client.get('/presets').get_json()['presets']


def test_operating_point_json(client):
    response = client.get('/presets/bench/operating-point')
    assert response.status_code == 200
    rows = response.get_json()['rows']
    assert [row['variant'] for row in rows] == ['simple', 'prm']
    assert rows[1]['recycling_gain'] == pytest.approx(4.0, rel=1e-6)


def test_spectrum_csv(client):
    response = client.get('/presets/bench/spectrum?format=csv&squeezed=off&variant=simple')
    assert response.status_code == 200
    assert response.mimetype == 'text/csv'
    assert response.get_data(as_text=True).startswith('frequency_hz,v_pd_linear,v_pd_db')


def test_unknown_preset_is_rejected(client):
    response = client.get('/presets/lisa/spectrum')
    assert response.status_code == 400
    assert response.get_json()['field'] == 'scenario'


def test_unknown_command_is_rejected(client):
    response = client.get('/presets/bench/render')
    assert response.status_code == 400
    assert response.get_json()['field'] == 'command'


def test_posted_scenario(client):
    body = {
        'command': 'operating-point',
        'variant': 'simple',
        'scenario': "input_power_mw = 20\ndark_port_power_mw = 3\ncavity_length_m = 1\n",
    }
    response = client.post('/run', json=body)
    assert response.status_code == 200
    rows = response.get_json()['rows']
    assert rows[0]['effective_reflectivity'] == pytest.approx(0.922, abs=5e-3)


def test_posted_scenario_with_bad_key(client):
    response = client.post('/run', json={'scenario': "input_power_mw = 20\nwarp = 9\n"})
    assert response.status_code == 400
    assert response.get_json() == {'error': 'line 2: warp: unknown key', 'field': 'warp', 'line': 2}


def test_posted_body_must_be_json(client):
    assert client.post('/run', data='spectrum', content_type='text/plain').status_code == 400


def test_solver_failure_is_422(client, monkeypatch):
    monkeypatch.setattr(Config, 'SOLVER_MAX_ITER', 1)
    response = client.post('/run', json={'preset': 'bench', 'command': 'operating-point'})
    assert response.status_code == 422
