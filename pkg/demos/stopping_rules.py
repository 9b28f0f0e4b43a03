"""Two ways to stop the fitting loop, and why the choice matters for the baseline.

Run:  python3 demos/stopping_rules.py

The default loop stops as soon as the reconstruction error stops falling
and hands back the best curve it saw.  The alternative runs a fixed number
of unconditional passes.  Continuous projection barely notices; the
nearest-vertex baseline drifts away from the data once it keeps going.
"""

from sphcurves.evaluation import MonteCarloConfig, method_config, run_monte_carlo
from sphcurves.dataio import load_bundled_catalog
from sphcurves.circlefit import fit_principal_circle
from sphcurves.pcurve import fit, sample_circle_vertices

RULES = {
    "stop on no decrease": {},
    "ten fixed passes": dict(stop_rule="change", threshold=1e-12, max_iter=10),
}

X = load_bundled_catalog().points
init = sample_circle_vertices(fit_principal_circle(X), 77)
print("earthquakes, T=77: error history of the nearest-vertex baseline")
for name, kw in RULES.items():
    for q in (0.1, 0.01):
        rep = fit(X, init, method_config("hauberg", 77, q, **kw))
        hist = " ".join(f"{d:.3f}" for d in rep.delta_history)
        print(f"  {name:<20} q={q:<5} distinct {rep.distinct_projections:2d}  delta: {hist}")

print("\nwave a=1/3, 4 waves, 20 runs")
for name, kw in RULES.items():
    cfg = MonteCarloConfig(shape="wave", freq=4, T=100, q=0.05, mean_kinds=("extrinsic", "hauberg"),
                           runs=20, seed=4, threads=4, **kw)
    m = run_monte_carlo(cfg)["methods"]
    e, h = m["extrinsic"]["error_mean"], m["hauberg"]["error_mean"]
    print(f"  {name:<20} extrinsic {e:.3f}  hauberg {h:.3f}  ratio {h / e:.2f}")
