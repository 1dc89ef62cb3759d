#!/usr/bin/env python3
"""Produce the two dual-plane figures: the domain scan and the rate curves.

Writes domain_scan.csv / rate_curve.csv plus gnuplot scripts into the
output directory.  The defaults reproduce the reference pictures (the
scan at x = 0.7, eps = 0.3; the curves on the seven-point x grid at
eps = 0.1); pass --samples to trade accuracy for time.

    python3 scripts/run_figures.py --out-dir runs/figures --samples 1000000
"""

import argparse
import sys

from squimld.cli import main as cli_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="runs/figures")
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--curve-samples", type=int, default=None,
                    help="per-x budget for the curves (default: same as --samples)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    curve_samples = args.curve_samples or args.samples
    rc = cli_main([
        "domain-scan", "--x", "0.7", "--eps", "0.3",
        "--samples", str(args.samples), "--seed", str(args.seed),
        "--workers", str(args.workers), "--out-dir", args.out_dir,
    ])
    if rc != 0:
        return rc
    return cli_main([
        "rate-curves", "--eps", "0.1",
        "--samples", str(curve_samples), "--seed", str(args.seed),
        "--workers", str(args.workers), "--out-dir", args.out_dir,
    ])


if __name__ == "__main__":
    sys.exit(main())
