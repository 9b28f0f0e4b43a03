"""Simulated datasets, catalog ingestion and file export.

Random numbers come from :func:`numpy.random.default_rng`, i.e. the PCG64
bit generator seeded through ``SeedSequence(seed)``; Gaussian draws use
numpy's ziggurat sampler and Cauchy draws numpy's ratio of normals.  Given
the seed and numpy's documented stream, datasets are reproducible.
"""

import csv
import json
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .geom import GeometryError, as_unit, from_spherical, lonlat_to_unit, unit_to_lonlat

log = logging.getLogger(__name__)

__all__ = [
    "DataError",
    "Dataset",
    "GenSpec",
    "generate",
    "true_curve",
    "load_catalog",
    "bundled_catalog_path",
    "load_bundled_catalog",
    "save_points",
    "export_curve",
    "curve_geojson",
    "report_to_dict",
]

USGS_COLUMNS = ("time", "latitude", "longitude", "mag", "magType")
_PHI_EPS = 1e-9


class DataError(ValueError):
    """Malformed input file or invalid dataset description."""


@dataclass
class Dataset:
    points: np.ndarray
    labels: list = None
    provenance: str = ""
    truth: np.ndarray = None
    clipped: np.ndarray = None

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class GenSpec:
    """Recipe for a simulated dataset.

    ``shape="circle"`` puts the noiseless points on the polar-angle circle
    ``phi = pi/4``; ``shape="wave"`` on ``phi = pi/2 + alpha sin(freq theta)``.
    Noise is added to ``phi``; for Cauchy noise ``noise_sigma`` is the scale.
    """

    shape: str = "circle"
    n: int = 100
    noise_sigma: float = 0.07
    noise_kind: str = "gaussian"
    alpha: float = 1 / 3
    freq: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.shape not in ("circle", "wave"):
            raise DataError(f"unknown shape {self.shape!r}")
        if self.noise_kind not in ("gaussian", "cauchy"):
            raise DataError(f"unknown noise kind {self.noise_kind!r}")
        if self.n < 2:
            raise DataError("n must be at least 2")
        if not self.noise_sigma >= 0:
            raise DataError("noise_sigma must be non-negative")


def _polar(spec, theta):
    if spec.shape == "circle":
        return np.full_like(theta, np.pi / 4)
    return spec.alpha * np.sin(spec.freq * theta) + np.pi / 2


def true_curve(spec, n=None):
    """Noiseless points of the generating curve at ``n`` equally spaced azimuths."""
    n = spec.n if n is None else n
    theta = 2 * np.pi * np.arange(n) / n
    return from_spherical(theta, _polar(spec, theta))


def generate(spec, rng=None):
    """Draw a dataset from ``spec``.

    Azimuths are ``2 pi i / n``; the noisy polar angle is clipped into
    ``(0, pi)`` and clipped points are flagged in ``Dataset.clipped``.
    """
    rng = np.random.default_rng(spec.seed) if rng is None else rng
    theta = 2 * np.pi * np.arange(spec.n) / spec.n
    phi0 = _polar(spec, theta)
    if spec.noise_kind == "gaussian":
        noise = rng.normal(0.0, spec.noise_sigma, spec.n) if spec.noise_sigma > 0 else np.zeros(spec.n)
    else:
        noise = spec.noise_sigma * rng.standard_cauchy(spec.n)
    phi = phi0 + noise
    clipped = (phi < _PHI_EPS) | (phi > np.pi - _PHI_EPS)
    phi = np.clip(phi, _PHI_EPS, np.pi - _PHI_EPS)
    return Dataset(
        points=from_spherical(theta, phi),
        provenance=f"simulated {spec}",
        truth=from_spherical(theta, phi0),
        clipped=clipped,
    )


_HEADER_NAMES = {
    2: (("lon_deg", "lat_deg"), ("lon", "lat"), ("longitude", "latitude")),
    3: (("x", "y", "z"),),
}


def _header_columns(row, ncols):
    names = [c.strip().lower() for c in row]
    for wanted in _HEADER_NAMES[ncols]:
        if all(w in names for w in wanted):
            return [names.index(w) for w in wanted]
    return None


def _parse_rows(path, ncols, strict):
    """Numeric rows of a headerless CSV.  A leading header naming the
    columns (e.g. ``x,y,z`` as written by :func:`export_curve`) is honoured."""
    rows, bad = [], []
    cols = list(range(ncols))
    with open(path, newline="", encoding="utf-8") as fh:
        first = True
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if first:
                first = False
                found = _header_columns(row, ncols)
                if found is not None:
                    cols = found
                    continue
            try:
                if len(row) <= max(cols):
                    raise ValueError(f"expected {max(cols) + 1} columns")
                rows.append([float(row[c]) for c in cols])
            except ValueError as exc:
                if strict:
                    raise DataError(f"{path}:{lineno}: {exc}") from None
                bad.append(lineno)
    return np.array(rows, dtype=float).reshape(-1, ncols), bad


def load_catalog(path, format="usgs-csv", min_magnitude=None, strict=True):
    """Read points from a CSV file.

    Formats:

    ``usgs-csv``
        Header row with at least ``time,latitude,longitude,mag,magType``.
        Rows with ``mag < min_magnitude`` are dropped; the remaining rows'
        columns are kept as per-point labels.
    ``lonlat-csv``
        ``lon,lat`` in degrees.
    ``xyz-csv``
        ``x,y,z``; rows are renormalized.

    The last two are headerless, except that a first row naming the columns
    (``x,y,z``, ``lon,lat`` or ``lon_deg,lat_deg``) selects them, so curve
    files from :func:`export_curve` load directly.

    Unparseable rows raise :class:`DataError` (with the line number) in
    strict mode and are skipped and counted otherwise.
    """
    path = Path(path)
    try:
        if format == "usgs-csv":
            return _load_usgs(path, min_magnitude, strict)
        if format == "lonlat-csv":
            arr, bad = _parse_rows(path, 2, strict)
            pts = lonlat_to_unit(arr[:, 0], arr[:, 1])
        elif format == "xyz-csv":
            arr, bad = _parse_rows(path, 3, strict)
            pts = as_unit(arr)
        else:
            raise DataError(f"unknown format {format!r}")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except GeometryError as exc:
        raise DataError(f"{path}: {exc}") from exc
    if bad:
        log.warning("%s: skipped %d unparseable rows", path, len(bad))
    return Dataset(pts.reshape(-1, 3), provenance=f"{format}:{path} (skipped {len(bad)})")


def _load_usgs(path, min_magnitude, strict):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in USGS_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise DataError(f"{path}: missing columns {missing}")
        lon, lat, labels, bad = [], [], [], []
        for row in reader:
            lineno = reader.line_num
            try:
                la, lo, mag = float(row["latitude"]), float(row["longitude"]), float(row["mag"])
                if not (np.isfinite(la) and np.isfinite(lo) and np.isfinite(mag)) or abs(la) > 90:
                    raise ValueError("invalid coordinate or magnitude")
            except (TypeError, ValueError) as exc:
                if strict:
                    raise DataError(f"{path}:{lineno}: {exc}") from None
                bad.append(lineno)
                continue
            if min_magnitude is not None and mag < min_magnitude:
                continue
            lat.append(la)
            lon.append(lo)
            labels.append(dict(row))
    if bad:
        log.warning("%s: skipped %d unparseable rows", path, len(bad))
    pts = lonlat_to_unit(np.array(lon), np.array(lat)).reshape(-1, 3)
    prov = f"usgs-csv:{path} mag>={min_magnitude} (skipped {len(bad)})"
    return Dataset(pts, labels=labels, provenance=prov)


def bundled_catalog_path():
    """Path of the bundled Pacific-rim great-earthquake catalog."""
    return resources.files("sphcurves") / "data" / "pacific_m8_catalog.csv"


def load_bundled_catalog(min_magnitude=8.0):
    with resources.as_file(bundled_catalog_path()) as p:
        return load_catalog(p, "usgs-csv", min_magnitude=min_magnitude)


def save_points(points, path):
    """Write points as headerless ``x,y,z`` rows (readable as ``xyz-csv``)."""
    np.savetxt(path, np.atleast_2d(points), delimiter=",", fmt="%.17g")


def curve_geojson(curve, projections=None):
    lon, lat = unit_to_lonlat(curve.vertices)
    line = [[float(a), float(b)] for a, b in zip(lon, lat)]
    if curve.closed:
        line.append(line[0])
    features = [{"type": "Feature", "properties": {"role": "curve", "closed": curve.closed},
                 "geometry": {"type": "LineString", "coordinates": line}}]
    if projections is not None:
        flon, flat = unit_to_lonlat(np.atleast_2d(projections.foot))
        feet = [[float(a), float(b)] for a, b in zip(flon, flat)]
        features.append({"type": "Feature", "properties": {"role": "projections"},
                         "geometry": {"type": "MultiPoint", "coordinates": feet}})
    return {"type": "FeatureCollection", "features": features}


def report_to_dict(report, config=None, metrics=None):
    """JSON-ready dict of a :class:`~sphcurves.pcurve.FitReport`.

    Keys: ``config``, ``delta_history``, ``iterations``, ``converged``,
    ``vertices``, ``projections``, ``metrics``.
    """
    c = report.final_curve
    p = report.projections
    base_metrics = {
        "reconstruction_error": report.delta,
        "distinct_projections": report.distinct_projections,
        "n": len(p),
        "T": c.T,
    }
    base_metrics.update(metrics or {})
    return {
        "config": dict(config or {}),
        "delta_history": [float(d) for d in report.delta_history],
        "iterations": report.iterations,
        "converged": report.converged,
        "closed": c.closed,
        "vertices": c.vertices.tolist(),
        "projections": {
            "lambda": np.atleast_1d(p.lam).tolist(),
            "foot": np.atleast_2d(p.foot).tolist(),
            "distance": np.atleast_1d(p.distance).tolist(),
            "segment": np.atleast_1d(p.segment).astype(int).tolist(),
        },
        "metrics": base_metrics,
    }


def export_curve(curve, projections, path, format="csv", report=None, config=None):
    """Write ``curve`` (and projection feet) to ``path``.

    ``csv`` rows are ``index,lambda,x,y,z,lon_deg,lat_deg``; ``geojson`` is a
    FeatureCollection with the curve as a LineString and the feet as a
    MultiPoint; ``json`` is the full report (``report`` is required).
    """
    path = Path(path)
    try:
        if format == "csv":
            lon, lat = unit_to_lonlat(curve.vertices)
            with open(path, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow(["index", "lambda", "x", "y", "z", "lon_deg", "lat_deg"])
                for i, (v, lam) in enumerate(zip(curve.vertices, curve.lambdas)):
                    w.writerow([i, repr(float(lam)), *(repr(float(c)) for c in v), repr(float(lon[i])), repr(float(lat[i]))])
        elif format == "geojson":
            path.write_text(json.dumps(curve_geojson(curve, projections), indent=1), encoding="utf-8")
        elif format == "json":
            if report is None:
                raise DataError("json export needs the fit report")
            path.write_text(json.dumps(report_to_dict(report, config), indent=1), encoding="utf-8")
        else:
            raise DataError(f"unknown export format {format!r}")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc


def load_curve_csv(path, closed=True):
    """Read vertices written by ``export_curve(..., format="csv")``."""
    from .pcurve import reparameterize_unit_speed

    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise DataError(f"{path}: no vertices")
    V = np.array([[float(r["x"]), float(r["y"]), float(r["z"])] for r in rows])
    return reparameterize_unit_speed(V, closed)
