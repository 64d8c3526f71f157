# squeezesim HTTP surface - runs scenarios over JSON/CSV

import io
import logging

from flask import Flask, Response, jsonify, request
from flask_cors import CORS

from squeezesim import __version__
from squeezesim.config import Config
from squeezesim.logging_config import configure_logging
from squeezesim.runner import dispatch
from squeezesim.services.errors import SolverError, ValidationError
from squeezesim.services.scenarios import VARIANTS, list_presets, load_scenario, parse_scenario

configure_logging()
logger = logging.getLogger(__name__)

app = Flask(__name__)

CORS(app, resources={
    r"/*": {
        "origins": Config.CORS_ORIGINS,
        "methods": ["GET", "POST", "OPTIONS"],
        "allow_headers": ["Content-Type"],
    }
})


def _flag(value):
    if value is None:
        return None
    if isinstance(value, bool):
        return value
    text = str(value).lower()
    if text not in ('on', 'off', 'true', 'false'):
        raise ValidationError(f"expected on or off, got {value!r}", field='squeezed')
    return text in ('on', 'true')


def _variant(value):
    if value is not None and value not in VARIANTS:
        raise ValidationError(f"must be one of {VARIANTS} (got {value!r})", field='variant')
    return value


def _respond(table, fmt):
    if fmt == 'csv':
        buffer = io.StringIO()
        table.write_csv(buffer)
        return Response(buffer.getvalue(), mimetype='text/csv')
    return jsonify({'columns': table.columns, 'rows': table.to_dicts()}), 200


@app.errorhandler(ValidationError)
def handle_validation_error(e):
    logger.warning(f"Rejected request: {e}")
    return jsonify(e.to_dict()), 400


@app.errorhandler(SolverError)
def handle_solver_error(e):
    logger.error(f"❌ Solver failure: {e}")
    return jsonify({'error': str(e)}), 422


@app.route('/', methods=['GET'])
def health_check():
    return jsonify({
        'status': 'healthy',
        'service': 'squeezesim',
        'version': __version__
    }), 200


@app.route('/health', methods=['GET'])
def health():
    return jsonify({'status': 'healthy'}), 200


@app.route('/presets', methods=['GET'])
def presets():
    return jsonify({'presets': list_presets()}), 200


@app.route('/presets/<name>/<command>', methods=['GET'])
def run_preset(name, command):
    """Run a command on a preset; ?variant=, ?squeezed=on|off, ?format=json|csv"""
    if name not in list_presets():
        raise ValidationError(f"unknown preset {name!r}", field='scenario')
    scenario = load_scenario(name)
    table = dispatch(
        command,
        scenario,
        _variant(request.args.get('variant')),
        _flag(request.args.get('squeezed')),
    )
    return _respond(table, request.args.get('format', 'json'))


@app.route('/run', methods=['POST'])
def run_posted():
    """
    Run a command on a posted scenario

    Body: {"command": "...", "scenario": "<scenario file text>" | "preset": "<name>",
           "variant": "simple|prm", "squeezed": "on|off", "format": "json|csv"}
    """

    data = request.get_json(silent=True)
    if not isinstance(data, dict):
        raise ValidationError("expected a JSON object body", field='body')

    if data.get('scenario') is not None:
        scenario = parse_scenario(str(data['scenario']), source='request')
    elif data.get('preset') in list_presets():
        scenario = load_scenario(data['preset'])
    else:
        raise ValidationError("give 'scenario' text or a 'preset' name", field='scenario')

    table = dispatch(
        data.get('command', 'spectrum'),
        scenario,
        _variant(data.get('variant')),
        _flag(data.get('squeezed')),
    )
    return _respond(table, data.get('format', 'json'))


if __name__ == '__main__':
    logger.info(f"🚀 Starting squeezesim on {Config.HOST}:{Config.PORT}")
    app.run(host=Config.HOST, port=Config.PORT)
