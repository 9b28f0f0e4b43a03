"""Principal curves and circles for data on the unit sphere."""

from .circlefit import Circle, CircleFitConfig, fit_pga_great_circle, fit_principal_circle
from .dataio import Dataset, GenSpec, export_curve, generate, load_catalog
from .evaluation import (
    MonteCarloConfig,
    PerturbSpec,
    distinct_projection_count,
    perturb_curve,
    reconstruction_error,
    run_monte_carlo,
    stationarity_gradient,
)
from .geom import geodesic_distance, geodesic_point, lonlat_to_unit, unit_to_lonlat
from .pcurve import (
    Curve,
    CurveFitConfig,
    FitReport,
    fit,
    project_to_curve,
    reparameterize_unit_speed,
    sample_circle_vertices,
)
from .stats import extrinsic_mean, geometric_median, intrinsic_mean

__version__ = "0.1.0"
