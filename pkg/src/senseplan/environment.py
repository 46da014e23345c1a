"""Ground-truth fields, regions of interest, and scenario placement.

A ground-truth field is the deterministic scalar function that the sensor
observes through noise.  Three kinds are supported:

``GridField``
    Values on a regular latitude/longitude lattice loaded from CSV, with
    missing cells defining the outside of the region of interest.  Queries
    return the nearest non-missing cell center.
``AnalyticField``
    A named closed-form function (catalog below) restricted to a mask.
``SampledField``
    One draw of the Gaussian-process prior at a fixed node set, queried by
    nearest node.  Used as the synthetic surrogate for gridded data.

Locations are ``(x, y)`` pairs; for geodata ``x`` is longitude and ``y``
is latitude, both in decimal degrees.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    DataError,
    FieldDomainError,
    InvalidInputError,
    PlacementError,
)
from .gp import KernelSpec, MeanSpec, as_point, as_points, sample_prior_field

#: Queries farther than this many cell diagonals from every non-missing
#: cell are treated as outside the data support.
SUPPORT_DIAGONALS = 2.0

#: Total rejection-sampling attempts allowed when placing a scenario.
MAX_PLACEMENT_ATTEMPTS = 1_000_000


# ---------------------------------------------------------------------------
# Regions of interest
# ---------------------------------------------------------------------------


class RoIMask:
    """Deterministic membership test for the region of interest."""

    def contains(self, point) -> bool:
        raise NotImplementedError

    def bounds(self) -> tuple[float, float, float, float]:
        """Axis-aligned bounding box ``(xmin, ymin, xmax, ymax)``."""
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class PolygonMask(RoIMask):
    """Planar polygon membership by the even-odd (ray casting) rule."""

    vertices: np.ndarray

    def __post_init__(self):
        verts = as_points(self.vertices)
        if len(verts) < 3:
            raise InvalidInputError("polygon needs at least 3 vertices")
        object.__setattr__(self, "vertices", verts)

    @classmethod
    def rectangle(cls, xmin: float, ymin: float, xmax: float, ymax: float) -> "PolygonMask":
        if not (xmax > xmin and ymax > ymin):
            raise InvalidInputError("rectangle must have positive extent")
        return cls(np.array([[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]]))

    def contains(self, point) -> bool:
        x, y = as_point(point)
        v = self.vertices
        inside = False
        for k in range(len(v)):
            x1, y1 = v[k]
            x2, y2 = v[(k + 1) % len(v)]
            if (y1 > y) != (y2 > y):
                xcross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
                if x < xcross:
                    inside = not inside
        return inside

    def bounds(self):
        mins = self.vertices.min(axis=0)
        maxs = self.vertices.max(axis=0)
        return float(mins[0]), float(mins[1]), float(maxs[0]), float(maxs[1])


# ---------------------------------------------------------------------------
# Gridded data
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GridData:
    """Values on a regular lat/lon lattice; NaN cells are outside the RoI.

    ``values[i, j]`` sits at latitude ``lat0 + i*dlat`` and longitude
    ``lon0 + j*dlon``.  ``lat_present``/``lon_present`` record which lattice
    rows and columns the source file actually mentioned, so serialization
    can preserve wholly absent rows instead of inventing coordinates.
    """

    lat0: float
    lon0: float
    dlat: float
    dlon: float
    values: np.ndarray
    lat_present: Optional[np.ndarray] = None
    lon_present: Optional[np.ndarray] = None
    lat_coords: Optional[np.ndarray] = field(default=None, repr=False)
    lon_coords: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if not (self.dlat > 0 and self.dlon > 0):
            raise InvalidInputError("grid cell sizes must be positive")
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2 or vals.size == 0:
            raise InvalidInputError("grid values must be a nonempty 2-D array")
        if not np.any(np.isfinite(vals)):
            raise InvalidInputError("grid must contain at least one non-missing cell")
        nlat, nlon = vals.shape
        lat_c = self.lat_coords
        lon_c = self.lon_coords
        if lat_c is None:
            lat_c = self.lat0 + self.dlat * np.arange(nlat)
        if lon_c is None:
            lon_c = self.lon0 + self.dlon * np.arange(nlon)
        lat_p = self.lat_present
        lon_p = self.lon_present
        lat_p = np.ones(nlat, dtype=bool) if lat_p is None else np.asarray(lat_p, dtype=bool)
        lon_p = np.ones(nlon, dtype=bool) if lon_p is None else np.asarray(lon_p, dtype=bool)
        if lat_p.shape != (nlat,) or lon_p.shape != (nlon,):
            raise InvalidInputError("presence masks must match the value array shape")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "lat_present", lat_p.copy())
        object.__setattr__(self, "lon_present", lon_p.copy())
        object.__setattr__(self, "lat_coords", np.asarray(lat_c, dtype=float).copy())
        object.__setattr__(self, "lon_coords", np.asarray(lon_c, dtype=float).copy())
        ii, jj = np.nonzero(np.isfinite(vals))
        centers = np.column_stack([self.lon_coords[jj], self.lat_coords[ii]])
        object.__setattr__(self, "_cell_index", np.column_stack([ii, jj]))
        object.__setattr__(self, "_flat_index", ii * nlon + jj)
        object.__setattr__(self, "_tree", cKDTree(centers))

    @property
    def cell_diagonal(self) -> float:
        return float(np.hypot(self.dlat, self.dlon))

    def nearest_cell(self, point) -> tuple[int, int, float]:
        """Nearest non-missing cell ``(i, j, distance)``; ties go to the
        lowest row-major index."""
        pt = as_point(point)
        dist, _ = self._tree.query(pt)
        radius = dist * (1.0 + 1e-12)
        ball = self._tree.query_ball_point(pt, radius)
        best = min(ball, key=lambda b: self._flat_index[b])
        i, j = self._cell_index[best]
        return int(i), int(j), float(dist)

    def value_at(self, point) -> float:
        i, j, dist = self.nearest_cell(point)
        if dist > SUPPORT_DIAGONALS * self.cell_diagonal:
            raise FieldDomainError(
                f"point {tuple(np.asarray(point, float))} is {dist:g} from the nearest "
                f"data cell, beyond the {SUPPORT_DIAGONALS:g}-diagonal support radius"
            )
        return float(self.values[i, j])

    def contains(self, point) -> bool:
        _, _, dist = self.nearest_cell(point)
        return dist <= SUPPORT_DIAGONALS * self.cell_diagonal

    def bounds(self):
        finite = np.isfinite(self.values)
        ii, jj = np.nonzero(finite)
        lats = self.lat_coords[ii]
        lons = self.lon_coords[jj]
        return (
            float(lons.min() - 0.5 * self.dlon),
            float(lats.min() - 0.5 * self.dlat),
            float(lons.max() + 0.5 * self.dlon),
            float(lats.max() + 0.5 * self.dlat),
        )


@dataclass(frozen=True, eq=False)
class GridMask(RoIMask):
    """RoI defined by the non-missing cells of gridded data."""

    grid: GridData

    def contains(self, point) -> bool:
        return self.grid.contains(point)

    def bounds(self):
        return self.grid.bounds()


def _infer_spacing(coords: np.ndarray, axis_name: str, path: str) -> float:
    """Cell size from sorted unique coordinates; single coordinate -> 1.0."""
    if len(coords) < 2:
        return 1.0
    diffs = np.diff(coords)
    d = float(diffs.min())
    if d <= 0:
        raise DataError(f"{path}: duplicate {axis_name} coordinates")
    offsets = (coords - coords[0]) / d
    if np.max(np.abs(offsets - np.round(offsets))) > 1e-6:
        raise DataError(f"{path}: {axis_name} coordinates are not uniformly spaced")
    return d


def load_grid_csv(path) -> GridData:
    """Parse a ``lat,lon,value`` CSV into :class:`GridData`.

    One row per cell center, decimal degrees.  Missing cells may be absent
    or carry the literal value token ``NA``.  Cell sizes are inferred as
    the minimal positive coordinate differences and the lattice must be
    uniform within 1e-6 (relative to the cell size).
    """
    path = str(path)
    rows: list[tuple[float, float, float]] = []
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"{path}: cannot open grid CSV ({exc})") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["lat", "lon", "value"]:
            raise DataError(f"{path}:1: expected header 'lat,lon,value'")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                lat = float(row[0])
                lon = float(row[1])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: bad coordinate ({exc})") from exc
            token = row[2].strip()
            if token == "NA":
                val = np.nan
            else:
                try:
                    val = float(token)
                except ValueError as exc:
                    raise DataError(
                        f"{path}:{lineno}: bad value {token!r} (use 'NA' for missing)"
                    ) from exc
                if not np.isfinite(val):
                    raise DataError(f"{path}:{lineno}: non-finite value")
            if not (np.isfinite(lat) and np.isfinite(lon)):
                raise DataError(f"{path}:{lineno}: non-finite coordinate")
            rows.append((lat, lon, val))
    if not rows:
        raise DataError(f"{path}: no data rows")

    lats = np.array(sorted({r[0] for r in rows}))
    lons = np.array(sorted({r[1] for r in rows}))
    dlat = _infer_spacing(lats, "latitude", path)
    dlon = _infer_spacing(lons, "longitude", path)
    lat0, lon0 = float(lats[0]), float(lons[0])
    nlat = int(round((lats[-1] - lat0) / dlat)) + 1
    nlon = int(round((lons[-1] - lon0) / dlon)) + 1

    lat_coords = lat0 + dlat * np.arange(nlat)
    lon_coords = lon0 + dlon * np.arange(nlon)
    lat_present = np.zeros(nlat, dtype=bool)
    lon_present = np.zeros(nlon, dtype=bool)
    lat_slot = {}
    for c in lats:
        i = int(round((c - lat0) / dlat))
        lat_coords[i] = c
        lat_present[i] = True
        lat_slot[c] = i
    lon_slot = {}
    for c in lons:
        j = int(round((c - lon0) / dlon))
        lon_coords[j] = c
        lon_present[j] = True
        lon_slot[c] = j

    values = np.full((nlat, nlon), np.nan)
    filled = np.zeros((nlat, nlon), dtype=bool)
    for lat, lon, val in rows:
        i, j = lat_slot[lat], lon_slot[lon]
        if filled[i, j]:
            raise DataError(f"{path}: duplicate cell at lat={lat!r}, lon={lon!r}")
        filled[i, j] = True
        values[i, j] = val
    if not np.any(np.isfinite(values)):
        raise DataError(f"{path}: every cell is missing")
    return GridData(
        lat0=lat0,
        lon0=lon0,
        dlat=dlat,
        dlon=dlon,
        values=values,
        lat_present=lat_present,
        lon_present=lon_present,
        lat_coords=lat_coords,
        lon_coords=lon_coords,
    )


def save_grid_csv(grid: GridData, path) -> None:
    """Write ``lat,lon,value`` rows for every present lattice cell.

    Missing cells in present rows/columns are written with the ``NA``
    token; wholly absent rows and columns are skipped, so a load/save
    cycle reproduces the file's information exactly.
    """
    with open(str(path), "w", newline="") as fh:
        fh.write("lat,lon,value\n")
        for i in range(grid.values.shape[0]):
            if not grid.lat_present[i]:
                continue
            for j in range(grid.values.shape[1]):
                if not grid.lon_present[j]:
                    continue
                v = grid.values[i, j]
                token = "NA" if not np.isfinite(v) else repr(float(v))
                fh.write(f"{float(grid.lat_coords[i])!r},{float(grid.lon_coords[j])!r},{token}\n")


# ---------------------------------------------------------------------------
# Ground-truth fields
# ---------------------------------------------------------------------------


def _eval_linear(params: Mapping[str, float], x: float, y: float) -> float:
    return params.get("a", 0.0) * x + params.get("b", 0.0) * y + params.get("c", 0.0)


def _eval_sinusoid(params: Mapping[str, float], x: float, y: float) -> float:
    a = params.get("a", 1.0)
    b = params.get("b", 1.0)
    c = params.get("c", 1.0)
    d = params.get("d", 0.0)
    return a * np.sin(b * x) * np.cos(c * y) + d


def _eval_gauss_bumps(params: Mapping[str, object], x: float, y: float) -> float:
    total = float(params.get("offset", 0.0))
    for amp, cx, cy, width in params.get("bumps", ()):
        r2 = (x - cx) ** 2 + (y - cy) ** 2
        total += amp * np.exp(-r2 / (2.0 * width**2))
    return total


#: Named analytic test fields: smooth functions with known structure.
ANALYTIC_CATALOG = {
    "linear": _eval_linear,
    "sinusoid": _eval_sinusoid,
    "gauss-bumps": _eval_gauss_bumps,
}


class GroundTruthField:
    """Deterministic scalar field over a region of interest."""

    kind: str = "abstract"

    def value(self, point) -> float:
        raise NotImplementedError

    def roi(self) -> RoIMask:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class GridField(GroundTruthField):
    """Field backed by gridded data; nearest non-missing cell lookup."""

    grid: GridData
    kind = "grid"

    def value(self, point) -> float:
        return self.grid.value_at(point)

    def roi(self) -> RoIMask:
        return GridMask(self.grid)


@dataclass(frozen=True, eq=False)
class AnalyticField(GroundTruthField):
    """Closed-form field from :data:`ANALYTIC_CATALOG`, limited to a mask."""

    name: str
    params: Mapping[str, object]
    region: RoIMask
    kind = "analytic"

    def __post_init__(self):
        if self.name not in ANALYTIC_CATALOG:
            raise InvalidInputError(
                f"unknown analytic field {self.name!r}; "
                f"choose from {sorted(ANALYTIC_CATALOG)}"
            )
        object.__setattr__(self, "params", dict(self.params))

    def value(self, point) -> float:
        pt = as_point(point)
        if not self.region.contains(pt):
            raise FieldDomainError(f"point {tuple(pt)} is outside the region of interest")
        return float(ANALYTIC_CATALOG[self.name](self.params, pt[0], pt[1]))

    def roi(self) -> RoIMask:
        return self.region


@dataclass(frozen=True, eq=False)
class SampledField(GroundTruthField):
    """Field fixed by values at a node set; nearest-node lookup."""

    nodes: np.ndarray
    node_values: np.ndarray
    region: RoIMask
    kind = "gp-sample"

    def __post_init__(self):
        nodes = as_points(self.nodes)
        vals = np.asarray(self.node_values, dtype=float).reshape(-1)
        if len(nodes) == 0 or len(nodes) != len(vals):
            raise InvalidInputError("sampled field needs one value per node")
        if not np.all(np.isfinite(vals)):
            raise InvalidInputError("sampled field values must be finite")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "node_values", vals)
        object.__setattr__(self, "_tree", cKDTree(nodes))

    def value(self, point) -> float:
        pt = as_point(point)
        if not self.region.contains(pt):
            raise FieldDomainError(f"point {tuple(pt)} is outside the region of interest")
        dist, _ = self._tree.query(pt)
        ball = self._tree.query_ball_point(pt, dist * (1.0 + 1e-12))
        return float(self.node_values[min(ball)])

    def roi(self) -> RoIMask:
        return self.region


def sample_field(
    mean: MeanSpec,
    kernel: KernelSpec,
    nodes,
    seed: int,
    region: RoIMask,
) -> SampledField:
    """Draw one prior field realization at ``nodes`` and wrap it as a field."""
    pts = as_points(nodes)
    values = sample_prior_field(mean, kernel, pts, seed)
    return SampledField(pts, values, region)


def field_value(fld: GroundTruthField, x) -> float:
    """True field value at ``x``; raises FieldDomainError outside the RoI."""
    return fld.value(x)


def measure(fld: GroundTruthField, x, noise_sd: float, rng: np.random.Generator) -> float:
    """Noisy reading ``field_value(x) + eps`` with ``eps ~ N(0, noise_sd^2)``."""
    if not (np.isfinite(noise_sd) and noise_sd >= 0):
        raise InvalidInputError("noise_sd must be finite and >= 0")
    value = field_value(fld, x)
    if noise_sd == 0:
        return value
    return value + float(rng.normal(0.0, noise_sd))


# ---------------------------------------------------------------------------
# Scenario placement
# ---------------------------------------------------------------------------


def place_scenario(
    mask: RoIMask,
    n_targets: int,
    n_candidates: int,
    n_shared: int,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Uniformly place target and candidate sets inside ``mask``.

    Exactly ``n_shared`` locations appear (bitwise identical) in both
    returned sets; all points are distinct and deterministic given the
    seed.  Rejection sampling draws from the mask's bounding box.
    """
    if n_targets < 1 or n_candidates < 1:
        raise InvalidInputError("need at least one target and one candidate")
    if not (0 <= n_shared <= min(n_targets, n_candidates)):
        raise InvalidInputError("n_shared must be <= min(n_targets, n_candidates)")
    xmin, ymin, xmax, ymax = mask.bounds()
    rng = np.random.default_rng(seed)
    need = n_targets + n_candidates - n_shared
    points: list[np.ndarray] = []
    seen: set[tuple[float, float]] = set()
    attempts = 0
    while len(points) < need:
        attempts += 1
        if attempts > MAX_PLACEMENT_ATTEMPTS:
            raise PlacementError(
                f"placed only {len(points)} of {need} points after "
                f"{MAX_PLACEMENT_ATTEMPTS} attempts; is the mask mostly empty?"
            )
        pt = rng.uniform((xmin, ymin), (xmax, ymax))
        key = (float(pt[0]), float(pt[1]))
        if key in seen or not mask.contains(pt):
            continue
        seen.add(key)
        points.append(pt)
    shared = points[:n_shared]
    target_only = points[n_shared : n_targets]
    candidate_only = points[n_targets:]
    targets = as_points(np.array(shared + target_only))
    candidates = as_points(np.array(shared + candidate_only))
    return targets, candidates
