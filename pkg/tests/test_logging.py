import json
import logging
import sys

from squeezesim.config import Config
from squeezesim.logging_config import configure_logging
from squeezesim.services.json_logger import JSONFormatter, StructuredLogger


def make_record(**extra):
    record = logging.LogRecord('squeezesim.runner', logging.INFO, __file__, 10, 'Spectrum complete', None, None)
    for key, value in extra.items():
        setattr(record, key, value)
    return record


def test_json_formatter_carries_run_fields():
    payload = json.loads(JSONFormatter().format(make_record(scenario='bench', variant='prm', points=200, status='completed')))
    assert payload['message'] == 'Spectrum complete'
    assert payload['level'] == 'INFO'
    assert payload['scenario'] == 'bench'
    assert payload['variant'] == 'prm'
    assert payload['points'] == 200
    assert 'squeezed' not in payload
    assert payload['timestamp'].endswith('Z')


def test_json_formatter_includes_exceptions():
    try:
        raise RuntimeError('no convergence')
    except RuntimeError:
        record = logging.LogRecord('x', logging.ERROR, __file__, 1, 'failed', None, sys.exc_info())
    payload = json.loads(JSONFormatter().format(record))
    assert payload['exception']['type'] == 'RuntimeError'
    assert payload['exception']['message'] == 'no convergence'


def test_structured_logger_passes_extra_fields(caplog):
    with caplog.at_level(logging.INFO):
        StructuredLogger('squeezesim.test').info('done', scenario='aligo', execution_ms=12)
    record = caplog.records[-1]
    assert record.scenario == 'aligo'
    assert record.execution_ms == 12
    assert record.variant is None


def test_configure_logging_writes_json_to_stderr(monkeypatch, capsys):
    monkeypatch.setattr(Config, 'JSON_LOGGING', True)
    configure_logging('INFO')
    logging.getLogger('squeezesim.test').info('hello')
    captured = capsys.readouterr()
    assert captured.out == ''
    assert json.loads(captured.err.strip().splitlines()[-1])['message'] == 'hello'


def test_configure_logging_plain(monkeypatch, capsys):
    monkeypatch.setattr(Config, 'JSON_LOGGING', False)
    configure_logging('WARNING')
    logging.getLogger('squeezesim.test').warning('plain text')
    assert 'WARNING - plain text' in capsys.readouterr().err
