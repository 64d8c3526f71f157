"""
Command-line interface

    python -m squeezesim spectrum --scenario bench --variant simple --squeezed off
    python -m squeezesim operating-point --scenario path/to/my.scn
    python -m squeezesim snr --scenario bench-measured --out snr.csv

CSV goes to standard output unless --out is given; logs go to standard error.
Exit codes: 0 success, 1 validation error, 2 solver failure.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from squeezesim import __version__
from squeezesim.logging_config import configure_logging
from squeezesim.runner import RUNS, dispatch
from squeezesim.services.errors import SolverError, ValidationError
from squeezesim.services.scenarios import VARIANTS, list_presets, load_scenario

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SOLVER = 2

COMMANDS = {
    'spectrum': 'detected variance V_pd over frequency',
    'operating-point': 'solved fringe offset, reflectivity and recycling gain',
    'snr': 'signal level, noise floor and squeezing SNR gain',
    'trace': 'spectrum-analyzer trace in dBm',
    'scan': 'squeezed beam on the homodyne with the LO phase swept',
}


def _on_off(text: str) -> bool:
    value = text.lower()
    if value not in ('on', 'off'):
        raise argparse.ArgumentTypeError(f"expected on or off, got {text!r}")
    return value == 'on'


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='squeezesim',
        description='Quantum noise of a power-recycled Michelson with squeezed vacuum at the dark port.',
        epilog=f"Built-in presets: {', '.join(list_presets())}",
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('--log-level', default=None, help='Override LOG_LEVEL')
    subparsers = parser.add_subparsers(dest='command', required=True)

    for command in RUNS:
        sub = subparsers.add_parser(command, help=COMMANDS[command])
        sub.add_argument('--scenario', required=True, help='Scenario file path or preset name')
        sub.add_argument('--out', type=Path, default=None, help='CSV output path (default: standard output)')
        sub.add_argument('--variant', choices=VARIANTS, default=None, help='Interferometer variant')
        sub.add_argument('--squeezed', type=_on_off, default=None, metavar='{on,off}', help='Inject squeezed vacuum')

    return parser


def run_command(args: argparse.Namespace):
    return dispatch(args.command, load_scenario(args.scenario), args.variant, args.squeezed)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)

    try:
        table = run_command(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverError as e:
        print(f"solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER

    if args.out is None:
        table.write_csv(sys.stdout)
    else:
        with open(args.out, 'w', newline='', encoding='utf-8') as stream:
            table.write_csv(stream)
        logger.info(f"Wrote {len(table)} rows to {args.out}")
    return EXIT_OK
