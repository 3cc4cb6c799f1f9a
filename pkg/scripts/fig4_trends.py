"""Sweep estimation RMSE and BER against SNR for both waveforms.

Runs the pilot-only (mu=50) and all-known-frames (mu=100) variants of a
single off-grid target over an SNR grid, then prints the coarse and
refined RMSE tables side by side.  The full CSVs land in the output
directory, one subdirectory per waveform.

Usage:
    python3 scripts/fig4_trends.py --trials 200 --out results/trends
"""

import argparse
import sys
from pathlib import Path

from jrcsim.config import parse_config
from jrcsim.runner import run_scenario
from jrcsim.tensorio import read_csv_rows

SNR_GRID = [0, 5, 10, 15, 20]


def pmcw_scenario(trials: int, seed: int) -> dict:
    block = 16 * 32e-9
    return {
        "version": 1,
        "waveform": "pmcw",
        "pmcw": {"code_length": 32, "n_frames": 16, "chip_time_s": 1e-9,
                 "carrier_hz": 60e9, "geometry": {"n_rx": 4}},
        "code_kind": "random",
        "scene": {"scatterers": [{"delay_s": 9e-9,
                                  "doppler_hz": 2.7 / block,
                                  "angle_rad": 0.3,
                                  "amplitude": [1.0, 0.0]}]},
        "sweep": {"mu_percent": [50, 100], "snr_db": SNR_GRID},
        "trials": trials,
        "seed": seed,
    }


def ofdma_scenario(trials: int, seed: int) -> dict:
    sample = 1 / (32 * 62.5e6)
    return {
        "version": 1,
        "waveform": "ofdma",
        "ofdma": {"n_subcarriers": 32, "n_symbols": 16,
                  "subcarrier_spacing_hz": 62.5e6, "carrier_hz": 60e9,
                  "cp_samples": 16, "geometry": {"n_rx": 4}},
        "scene": {"scatterers": [{"delay_s": 5.7 * sample,
                                  "doppler_hz": 0.0,
                                  "angle_rad": -0.2,
                                  "amplitude": [1.0, 0.0]}]},
        "sweep": {"mu_percent": [50, 100], "snr_db": SNR_GRID},
        "trials": trials,
        "seed": seed,
    }


def print_tables(out_dir: Path, coarse_col: str, refined_col: str) -> None:
    header, rows = read_csv_rows(out_dir / "rmse_vs_snr.csv")
    _, ber_rows = read_csv_rows(out_dir / "ber_vs_snr.csv")
    bers = {(r[0], r[1]): r[-1] for r in ber_rows}
    unit = "s" if "delay" in coarse_col else "Hz"
    print(f"  {'mu':>5} {'snr_db':>7} {'coarse_rmse':>13} "
          f"{'refined_rmse':>13} {'ber':>10}   [{unit}]")
    for row in rows:
        vals = dict(zip(header, row))
        print(f"  {float(vals['mu_percent']):5.0f} "
              f"{float(vals['snr_db']):7.1f} "
              f"{float(vals[coarse_col]):13.4e} "
              f"{float(vals[refined_col]):13.4e} "
              f"{float(bers[(row[0], row[1])]):10.4f}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=200,
                        help="Monte-Carlo trials per sweep point")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", default="results/trends",
                        help="output directory root")
    args = parser.parse_args(argv)

    jobs = (("pmcw", pmcw_scenario(args.trials, args.seed),
             "rmse_doppler_hz", "refined_rmse_doppler_hz"),
            ("ofdma", ofdma_scenario(args.trials, args.seed),
             "rmse_delay_s", "refined_rmse_delay_s"))
    for name, scenario, coarse_col, refined_col in jobs:
        out_dir = Path(args.out) / name
        report = run_scenario(parse_config(scenario), out_dir=out_dir,
                              workers=args.workers)
        print(f"{name}: {args.trials} trials/point, "
              f"{report.wall_clock_s:.1f}s -> {out_dir}")
        print_tables(out_dir, coarse_col, refined_col)
    return 0


if __name__ == "__main__":
    sys.exit(main())
