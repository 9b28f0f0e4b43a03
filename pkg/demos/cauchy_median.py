"""Heavy-tailed noise: the median curve ignores outliers that drag the mean curve.

Run:  python3 demos/cauchy_median.py
"""

import numpy as np

from sphcurves import GenSpec, generate
from sphcurves.circlefit import fit_principal_circle
from sphcurves.geom import NORTH, geodesic_distance
from sphcurves.pcurve import CurveFitConfig, fit, sample_circle_vertices

print(f"{'seed':>4} {'outliers':>8} {'extrinsic':>10} {'median':>8}")
for seed in range(10):
    # Cauchy noise of scale 0.05 on the polar angle of the circle phi = pi/4
    ds = generate(GenSpec(n=200, noise_sigma=0.05, noise_kind="cauchy", seed=seed))
    far = int(np.sum(np.abs(geodesic_distance(ds.points, ds.truth)) > 0.5))
    init = sample_circle_vertices(fit_principal_circle(ds.points), 100)
    row = []
    for kind in ("extrinsic", "median"):
        V = fit(ds.points, init, CurveFitConfig(T=100, q=0.1, mean_kind=kind)).final_curve.vertices
        # mean distance of the curve's vertices from the true circle
        row.append(np.mean(np.abs(geodesic_distance(V, NORTH) - np.pi / 4)))
    print(f"{seed:>4} {far:>8} {row[0]:>10.4f} {row[1]:>8.4f}")
