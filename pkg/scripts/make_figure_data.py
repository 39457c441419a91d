"""Regenerate the standard figure datasets into an output directory.

Each dataset is produced through the cachematch CLI so the CSV schemas
stay identical to what a user would get by hand.  Everything is seeded,
so reruns are byte-identical.
"""

import argparse
import pathlib

from cachematch.cli import main as cachematch_main

REPO = pathlib.Path(__file__).resolve().parent.parent
SHALLOW_CONFIG = str(REPO / "configs" / "default.json")
STEEP_CONFIG = str(REPO / "configs" / "steep.json")


def rate_curves(out_dir, trials, seed, workers):
    # shallow catalog: sweep cache memory across the coded regime
    cachematch_main([
        "rate-curve", SHALLOW_CONFIG,
        "--param", "M", "--start", "1", "--stop", "60", "--step", "1",
        "--trials", str(trials), "--seed", str(seed),
        "--workers", str(workers),
        "--out", str(out_dir / "rates_shallow_vs_memory.csv"),
    ])
    # steep catalog: memory sweep includes the sub-unit regime
    cachematch_main([
        "rate-curve", STEEP_CONFIG,
        "--param", "M", "--start", "0.5", "--stop", "16", "--step", "0.5",
        "--trials", str(trials), "--seed", str(seed),
        "--workers", str(workers),
        "--out", str(out_dir / "rates_steep_vs_memory.csv"),
    ])
    # popularity sweep at fixed memory, crossing beta = 1 is not allowed,
    # so stop short of it
    cachematch_main([
        "rate-curve", SHALLOW_CONFIG,
        "--param", "beta", "--start", "0", "--stop", "0.9", "--step", "0.05",
        "--out", str(out_dir / "rates_vs_beta.csv"),
    ])


def regime_maps(out_dir, resolution):
    cachematch_main([
        "regime-map", "--beta", "0.5", "--nu", "1.0",
        "--resolution", str(resolution),
        "--out", str(out_dir / "regimes_shallow.csv"),
    ])
    cachematch_main([
        "regime-map", "--beta", "2.0", "--nu", "1.0",
        "--resolution", str(resolution),
        "--out", str(out_dir / "regimes_steep.csv"),
    ])


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="figure_data")
    parser.add_argument("--trials", type=int, default=0,
                        help="Monte Carlo trials per sweep point (0 = analytic only)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--resolution", type=int, default=50)
    args = parser.parse_args()

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rate_curves(out_dir, args.trials, args.seed, args.workers)
    regime_maps(out_dir, args.resolution)
    print(f"wrote 5 datasets to {out_dir}/")


if __name__ == "__main__":
    main()
