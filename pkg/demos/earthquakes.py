"""Great earthquakes around the Pacific: circles and curves through the ring of fire.

Run:  python3 demos/earthquakes.py
"""

from sphcurves.circlefit import circle_loss, fit_pga_great_circle, fit_principal_circle
from sphcurves.dataio import load_bundled_catalog
from sphcurves.evaluation import method_config, reconstruction_error
from sphcurves.geom import unit_to_lonlat
from sphcurves.pcurve import fit, sample_circle_vertices

ds = load_bundled_catalog(min_magnitude=8.0)
X = ds.points
print(f"{len(X)} events with magnitude >= 8\n")

# A great circle through the mean is a poor summary of a ring around an
# ocean; a small circle fitted by least squares hugs it far better.
pga = fit_pga_great_circle(X)
pc = fit_principal_circle(X)
lon, lat = unit_to_lonlat(pc.center)
print(f"great circle (tangent PCA)  loss {circle_loss(X, pga):7.3f}")
print(f"principal circle            loss {circle_loss(X, pc):7.3f}  "
      f"centre lon {lon:.1f} lat {lat:.1f}, radius {pc.radius:.3f} rad\n")

# The circle seeds the curve.  Continuous projection lets each event land
# anywhere on the curve; the nearest-vertex baseline piles them onto vertices.
print(f"{'T':>4} {'q':>5}  " + "  ".join(f"{m:>19}" for m in ("extrinsic", "intrinsic", "hauberg")))
for T in (77, 500):
    init = sample_circle_vertices(pc, T)
    for q in (0.2, 0.1, 0.05, 0.01):
        cells = []
        for m in ("extrinsic", "intrinsic", "hauberg"):
            rep = fit(X, init, method_config(m, T, q))
            rule = "hauberg" if m == "hauberg" else "continuous"
            err = reconstruction_error(X, rep.final_curve, rule)
            cells.append(f"{err:9.3f} ({rep.distinct_projections:2d}/{len(X)})")
        print(f"{T:>4} {q:>5}  " + "  ".join(cells))

print("\ncells show reconstruction error and (distinct projection points / events)")
