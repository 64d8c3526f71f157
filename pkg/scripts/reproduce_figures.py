"""Write the spectrum family, SNR tables and analyzer traces for the presets"""
import argparse
import os
import sys
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from squeezesim.logging_config import configure_logging
from squeezesim.runner import run_operating_point, run_scan, run_snr, run_spectrum, run_trace
from squeezesim.services.scenarios import VARIANTS, load_scenario


def write(table, path):
    with open(path, 'w', newline='', encoding='utf-8') as stream:
        table.write_csv(stream)
    print(f"   ✅ {path} ({len(table)} rows)")


def reproduce(out_dir):
    os.makedirs(out_dir, exist_ok=True)

    for preset in ('bench', 'aligo'):
        scenario = load_scenario(preset)
        print(f"\n📈 {preset}: spectra (simple/prm x squeezed/unsqueezed)")
        for variant in VARIANTS:
            for squeezed in (True, False):
                tag = 'sqz' if squeezed else 'nosqz'
                write(run_spectrum(scenario, variant, squeezed), os.path.join(out_dir, f"{preset}_{variant}_{tag}.csv"))
        write(run_operating_point(scenario), os.path.join(out_dir, f"{preset}_operating_point.csv"))

    scenario = load_scenario('bench-measured')
    print("\n📡 bench-measured: traces, scan and SNR")
    write(run_scan(scenario), os.path.join(out_dir, 'bench-measured_scan.csv'))
    for variant in VARIANTS:
        for squeezed in (True, False):
            tag = 'sqz' if squeezed else 'nosqz'
            write(run_trace(scenario, variant, squeezed), os.path.join(out_dir, f"bench-measured_trace_{variant}_{tag}.csv"))
    snr = run_snr(scenario)
    write(snr, os.path.join(out_dir, 'bench-measured_snr.csv'))

    for row in snr.to_dicts():
        print(
            f"   {row['variant']:>6}: floor {row['noise_floor_db']:+.2f} dB "
            f"({row['noise_floor_with_electronics_db']:+.2f} dB with electronics), "
            f"signal {row['signal_vs_simple_db']:+.2f} dB vs simple"
        )


if __name__ == '__main__':
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument('out_dir', nargs='?', default='figures')
    args = parser.parse_args()

    configure_logging('WARNING')
    reproduce(args.out_dir)
