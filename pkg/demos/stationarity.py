"""Is a fitted curve a critical point of its loss?

Run:  python3 demos/stationarity.py

Each fitted curve is nudged towards 20 random smooth targets and the
derivative of the matching mean loss is estimated by central differences.
Dividing by the loss level gives a scale-free number: small for a curve
that sits where the data want it, large for the same curve rotated away.
"""

import numpy as np

from sphcurves import GenSpec, generate
from sphcurves.circlefit import fit_principal_circle
from sphcurves.evaluation import (
    PerturbSpec,
    loss_scale,
    random_perturbation_target,
    stationarity_gradient,
    translate_curve,
)
from sphcurves.pcurve import CurveFitConfig, fit, sample_circle_vertices

X = generate(GenSpec(n=100, noise_sigma=0.07, seed=0)).points
init = sample_circle_vertices(fit_principal_circle(X), 100)


def worst_ratio(curve, loss):
    rng = np.random.default_rng(0)
    g = [abs(stationarity_gradient(X, curve, PerturbSpec(random_perturbation_target(curve, rng)), loss))
         for _ in range(20)]
    return max(g) / loss_scale(X, curve, loss)


print(f"{'centre':<10} {'loss':<9} {'fitted':>8} {'rotated 0.1':>12}")
for kind, loss in (("extrinsic", "cosine"), ("intrinsic", "squared"), ("median", "absolute")):
    f = fit(X, init, CurveFitConfig(T=100, q=0.05, mean_kind=kind)).final_curve
    moved = translate_curve(f, [1, 0, 0], 0.1)
    print(f"{kind:<10} {loss:<9} {worst_ratio(f, loss):8.4f} {worst_ratio(moved, loss):12.3f}")
