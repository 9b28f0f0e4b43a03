"""Noisy circles: how close do the fitted curves get to the truth?

Run:  python3 demos/circle_monte_carlo.py [runs]
"""

import sys

from sphcurves.evaluation import MonteCarloConfig, run_monte_carlo

runs = int(sys.argv[1]) if len(sys.argv) > 1 else 20

# 100 points on the polar-angle circle phi = pi/4, Gaussian noise of 0.07 rad
# on phi, 100-vertex curves with a 5% bandwidth.  Error is the sum of squared
# distances from the noiseless points to the fitted curve.
for shape in ("circle", "wave"):
    cfg = MonteCarloConfig(shape=shape, noise_sigma=0.07, n=100, T=100, q=0.05,
                           mean_kinds=("extrinsic", "intrinsic", "hauberg"), runs=runs, seed=1, threads=4)
    rep = run_monte_carlo(cfg)
    print(f"\n{shape}, {runs} runs")
    print(f"  {'method':<10} {'error':>8} {'sd':>7} {'distinct':>9} {'sd':>6}")
    for m, r in rep["methods"].items():
        print(f"  {m:<10} {r['error_mean']:8.4f} {r['error_sd']:7.4f} {r['distinct_mean']:9.2f} {r['distinct_sd']:6.2f}")
