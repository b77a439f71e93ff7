"""Point-cloud and mask primitives.

Metrics (Euclidean and constant-curvature geodesic), filtration functions
(distance-to-measure, tubular, height), random transforms, convex hulls,
rasterization, and the area-ratio convexity measure.

Conventions:
  - point clouds are float arrays of shape (n, d) with d in {2, 3};
  - geodesic-polar samples carry (rho, phi) with rho <= 1 plus a curvature;
  - masks index cells as cells[ix, iy] with x increasing along axis 0 and y
    along axis 1; cell (ix, iy) covers a square of side width/c whose center
    is origin + ((ix + .5) * cell, (iy + .5) * cell).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .seeding import generator

Array = np.ndarray

_UNIT_TOL = 1e-12


def _frozen_array(values, dtype=float) -> Array:
    a = np.array(values, dtype=dtype)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PointCloud:
    """Finite sample of points in R^2 or R^3."""

    points: Array

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("point cloud must be a nonempty (n, d) array")
        if pts.shape[1] not in (2, 3):
            raise ValueError(f"point cloud dimension must be 2 or 3, got {pts.shape[1]}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point cloud coordinates must be finite")
        object.__setattr__(self, "points", _frozen_array(pts))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class PolarCloud:
    """Geodesic-polar samples (rho, phi) on a constant-curvature unit disk."""

    coords: Array  # (n, 2): rho in [0, 1], phi in [0, 2*pi)
    curvature: float

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coords, dtype=float))
        if c.ndim != 2 or c.shape[1] != 2 or c.shape[0] < 1:
            raise ValueError("polar coords must be a nonempty (n, 2) array")
        if not np.all(np.isfinite(c)):
            raise ValueError("polar coords must be finite")
        rho, phi = c[:, 0], c[:, 1]
        if np.any(rho < 0) or np.any(rho > 1 + 1e-12):
            raise ValueError("geodesic radius rho must lie in [0, 1]")
        if np.any(phi < 0) or np.any(phi >= 2 * math.pi):
            raise ValueError("azimuth phi must lie in [0, 2*pi)")
        kappa = float(self.curvature)
        if not math.isfinite(kappa) or not -2.0 <= kappa <= 2.0:
            raise ValueError("curvature must be finite and in [-2, 2]")
        object.__setattr__(self, "coords", _frozen_array(c))
        object.__setattr__(self, "curvature", kappa)

    @property
    def n(self) -> int:
        return self.coords.shape[0]


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric nonnegative pairwise-distance matrix with zero diagonal."""

    values: Array

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] < 1:
            raise ValueError("distance matrix must be square and nonempty")
        if not np.all(np.isfinite(v)):
            raise ValueError("distance matrix entries must be finite")
        if np.any(v < 0):
            raise ValueError("distance matrix entries must be nonnegative")
        if np.any(np.diag(v) != 0):
            raise ValueError("distance matrix diagonal must be zero")
        if not np.array_equal(v, v.T):
            raise ValueError("distance matrix must be symmetric")
        object.__setattr__(self, "values", _frozen_array(v))

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class Line:
    """Infinite line in the plane given by an anchor point and a unit direction."""

    anchor: Array
    direction: Array

    def __post_init__(self):
        a = np.asarray(self.anchor, dtype=float).reshape(2)
        d = np.asarray(self.direction, dtype=float).reshape(2)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(d))):
            raise ValueError("line anchor and direction must be finite")
        if abs(float(np.hypot(d[0], d[1])) - 1.0) > _UNIT_TOL:
            raise ValueError("line direction must be a unit vector (within 1e-12)")
        object.__setattr__(self, "anchor", _frozen_array(a))
        object.__setattr__(self, "direction", _frozen_array(d))

    @classmethod
    def through(cls, p: Array, q: Array) -> "Line":
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        d = q - p
        norm = float(np.hypot(d[0], d[1]))
        if norm == 0:
            raise ValueError("cannot build a line through two identical points")
        return cls(p, d / norm)

    @classmethod
    def horizontal(cls, y: float) -> "Line":
        return cls((0.0, y), (1.0, 0.0))

    @classmethod
    def vertical(cls, x: float) -> "Line":
        return cls((x, 0.0), (0.0, 1.0))


@dataclass(frozen=True)
class Polygon:
    """Simple polygon with counter-clockwise vertices (signed area > 0)."""

    vertices: Array

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise ValueError("polygon needs at least 3 planar vertices")
        if not np.all(np.isfinite(v)):
            raise ValueError("polygon vertices must be finite")
        if _signed_area(v) <= 0:
            raise ValueError("polygon vertices must be counter-clockwise")
        if not _is_simple(v):
            raise ValueError("polygon must be simple (no self-intersection)")
        object.__setattr__(self, "vertices", _frozen_array(v))

    @property
    def n(self) -> int:
        return self.vertices.shape[0]


@dataclass(frozen=True)
class BinaryMask:
    """Square occupancy grid with a physical extent.

    ``cells[ix, iy]`` covers the square of side ``width / side`` whose center
    is ``origin + ((ix + .5) * cell, (iy + .5) * cell)``.
    """

    cells: Array
    origin: Array = field(default_factory=lambda: np.zeros(2))
    width: float = 1.0

    def __post_init__(self):
        c = np.asarray(self.cells, dtype=bool)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] < 2:
            raise ValueError("mask cells must be square with side >= 2")
        if not c.any():
            raise ValueError("mask must contain at least one occupied cell")
        o = np.asarray(self.origin, dtype=float).reshape(2)
        w = float(self.width)
        if not (np.all(np.isfinite(o)) and math.isfinite(w) and w > 0):
            raise ValueError("mask extent must be finite with positive width")
        object.__setattr__(self, "cells", _frozen_array(c, dtype=bool))
        object.__setattr__(self, "origin", _frozen_array(o))
        object.__setattr__(self, "width", w)

    @property
    def side(self) -> int:
        return self.cells.shape[0]

    @property
    def cell_size(self) -> float:
        return self.width / self.side

    def cell_centers(self) -> Array:
        """Centers of all cells, shape (side, side, 2)."""
        c = self.side
        step = self.cell_size
        xs = self.origin[0] + (np.arange(c) + 0.5) * step
        ys = self.origin[1] + (np.arange(c) + 0.5) * step
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.stack([gx, gy], axis=-1)

    def occupied_centers(self) -> Array:
        """Centers of occupied cells, shape (k, 2)."""
        return self.cell_centers()[self.cells]


_TABLE_RANGES = {
    "translation": (-1.0, 1.0),
    "rotation": (-20.0, 20.0),  # degrees, applied clockwise
    "stretch": (0.8, 1.2),  # x-axis scale factor
    "shear": (-0.2, 0.2),
    "gaussian": (0.0, 0.1),  # noise standard deviation
    "outliers": (0.0, 0.1),  # replaced fraction
}


@dataclass(frozen=True)
class TransformSpec:
    """One of the six point-cloud perturbations with its magnitude range."""

    kind: str
    low: float = math.nan
    high: float = math.nan

    def __post_init__(self):
        if self.kind not in _TABLE_RANGES:
            raise ValueError(f"unknown transform kind: {self.kind!r}")
        lo, hi = _TABLE_RANGES[self.kind]
        low = lo if math.isnan(self.low) else float(self.low)
        high = hi if math.isnan(self.high) else float(self.high)
        if not low <= high:
            raise ValueError("transform range must satisfy low <= high")
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)

    @staticmethod
    def kinds() -> tuple:
        return tuple(_TABLE_RANGES)


# ---------------------------------------------------------------------------
# metrics and filtration functions
# ---------------------------------------------------------------------------


def euclidean_distance_matrix(cloud: PointCloud) -> DistanceMatrix:
    """All pairwise Euclidean distances."""
    pts = cloud.points
    diff = pts[:, None, :] - pts[None, :, :]
    d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    d = 0.5 * (d + d.T)  # kill asymmetric rounding
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(d)


def geodesic_distance_matrix(cloud: PolarCloud) -> DistanceMatrix:
    """Pairwise geodesic distances on the constant-curvature disk.

    Uses the spherical / planar / hyperbolic law of cosines on the intrinsic
    polar coordinates, so no embedding is ever constructed.
    """
    kappa = cloud.curvature
    rho = cloud.coords[:, 0]
    phi = cloud.coords[:, 1]
    cos_dphi = np.cos(phi[:, None] - phi[None, :])
    if kappa > 0:
        r = 1.0 / math.sqrt(kappa)
        a = rho[:, None] / r
        b = rho[None, :] / r
        cos_d = np.cos(a) * np.cos(b) + np.sin(a) * np.sin(b) * cos_dphi
        d = r * np.arccos(np.clip(cos_d, -1.0, 1.0))
    elif kappa < 0:
        r = 1.0 / math.sqrt(-kappa)
        a = rho[:, None] / r
        b = rho[None, :] / r
        cosh_d = np.cosh(a) * np.cosh(b) - np.sinh(a) * np.sinh(b) * cos_dphi
        d = r * np.arccosh(np.maximum(cosh_d, 1.0))
    else:
        sq = rho[:, None] ** 2 + rho[None, :] ** 2 - 2.0 * np.outer(rho, rho) * cos_dphi
        d = np.sqrt(np.maximum(sq, 0.0))
    d = 0.5 * (d + d.T)
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(d)


def dtm(matrix: DistanceMatrix, m: float) -> Array:
    """Distance-to-measure values: per-point RMS distance to the k nearest neighbors.

    k = ceil(m * n) with the point itself excluded, capped at n - 1.
    """
    if not 0.0 < m <= 1.0:
        raise ValueError("dtm mass fraction m must lie in (0, 1]")
    n = matrix.n
    if n < 2:
        raise ValueError("dtm needs at least two points")
    k = min(max(1, math.ceil(m * n)), n - 1)
    d = matrix.values
    rows = np.sort(d, axis=1)[:, 1 : k + 1]  # drop the zero self-distance
    return np.sqrt(np.mean(rows**2, axis=1))


def tubular_distance(point: Array, line: Line) -> float:
    """Euclidean distance from a planar point to an infinite line."""
    p = np.asarray(point, dtype=float).reshape(2)
    rel = p - line.anchor
    return abs(float(rel[0] * line.direction[1] - rel[1] * line.direction[0]))


def tubular_distances(points: Array, line: Line) -> Array:
    """Vectorized ``tubular_distance`` for an (n, 2) array of points."""
    rel = np.asarray(points, dtype=float).reshape(-1, 2) - line.anchor
    return np.abs(rel[:, 0] * line.direction[1] - rel[:, 1] * line.direction[0])


def _check_unit(v: Array) -> Array:
    v = np.asarray(v, dtype=float).ravel()
    if abs(float(np.linalg.norm(v)) - 1.0) > _UNIT_TOL:
        raise ValueError("direction must be a unit vector (within 1e-12)")
    return v


def height(point: Array, v: Array) -> float:
    """Scalar product of a point with a unit direction."""
    v = _check_unit(v)
    return float(np.dot(np.asarray(point, dtype=float).ravel(), v))


def absolute_height(point: Array, v: Array) -> float:
    """Absolute scalar product: distance to the hyperplane through the origin."""
    return abs(height(point, v))


# ---------------------------------------------------------------------------
# subsampling and transforms
# ---------------------------------------------------------------------------


def farthest_point_subsample(cloud: PointCloud, k: int, seed: int) -> PointCloud:
    """Greedy maximin subsample of k points; the first point is drawn by seed."""
    n = cloud.n
    if not 1 <= k <= n:
        raise ValueError(f"subsample size must lie in [1, {n}], got {k}")
    rng = generator(seed)
    pts = cloud.points
    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = rng.integers(n)
    best = np.linalg.norm(pts - pts[chosen[0]], axis=1)
    for i in range(1, k):
        nxt = int(np.argmax(best))  # argmax takes the first max: deterministic ties
        chosen[i] = nxt
        best = np.minimum(best, np.linalg.norm(pts - pts[nxt], axis=1))
    return PointCloud(pts[chosen])


def apply_transform(cloud: PointCloud, spec: TransformSpec, seed: int) -> PointCloud:
    """Apply one random transform drawn from the spec's magnitude range.

    Rotation, stretch and shear act on the (x, y) coordinates; a third
    coordinate is left unchanged. Rotation is clockwise.
    """
    rng = generator(seed)
    pts = cloud.points.copy()
    kind = spec.kind
    if kind == "translation":
        pts += rng.uniform(spec.low, spec.high, size=cloud.dim)
    elif kind == "rotation":
        theta = math.radians(rng.uniform(spec.low, spec.high))
        c, s = math.cos(theta), math.sin(theta)
        x, y = pts[:, 0].copy(), pts[:, 1].copy()
        pts[:, 0] = c * x + s * y
        pts[:, 1] = -s * x + c * y
    elif kind == "stretch":
        pts[:, 0] *= rng.uniform(spec.low, spec.high)
    elif kind == "shear":
        factor = rng.uniform(spec.low, spec.high)
        pts[:, 1] += factor * pts[:, 0]
    elif kind == "gaussian":
        sigma = rng.uniform(spec.low, spec.high)
        if sigma > 0:
            pts += rng.normal(0.0, sigma, size=pts.shape)
    elif kind == "outliers":
        frac = rng.uniform(spec.low, spec.high)
        count = int(round(frac * cloud.n))
        if count > 0:
            idx = rng.choice(cloud.n, size=count, replace=False)
            lo = pts.min(axis=0)
            hi = pts.max(axis=0)
            pts[idx] = rng.uniform(lo, hi, size=(count, cloud.dim))
    else:  # pragma: no cover - TransformSpec already validates
        raise ValueError(f"unknown transform kind: {kind!r}")
    return PointCloud(pts)


# ---------------------------------------------------------------------------
# hulls, polygons, rasterization
# ---------------------------------------------------------------------------


def _signed_area(vertices: Array) -> float:
    x = vertices[:, 0]
    y = vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_cross(p1, p2, q1, q2) -> bool:
    """Proper or improper intersection of open segments (shared endpoints excluded)."""

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True

    def on_open_segment(a, b, c):
        if orient(a, b, c) != 0:
            return False
        return (
            min(a[0], b[0]) < c[0] < max(a[0], b[0])
            or min(a[1], b[1]) < c[1] < max(a[1], b[1])
        )

    return (
        on_open_segment(p1, p2, q1)
        or on_open_segment(p1, p2, q2)
        or on_open_segment(q1, q2, p1)
        or on_open_segment(q1, q2, p2)
    )


def _is_simple(vertices: Array) -> bool:
    m = len(vertices)
    segs = [(vertices[i], vertices[(i + 1) % m]) for i in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            if j == i + 1 or (i == 0 and j == m - 1):
                continue  # adjacent edges share an endpoint by construction
            if _segments_cross(*segs[i], *segs[j]):
                return False
    return True


def convex_hull(points: Array) -> Polygon:
    """Counter-clockwise convex hull via the monotone chain sweep.

    Raises ValueError when the input is degenerate (fewer than 3 distinct
    non-collinear points).
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    uniq = sorted({(float(x), float(y)) for x, y in pts})
    if len(uniq) < 3:
        raise ValueError("convex hull needs at least 3 distinct points")

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in uniq:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(uniq):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise ValueError("convex hull is degenerate: input points are collinear")
    return Polygon(np.array(hull))


def polygon_area(polygon: Polygon) -> float:
    """Shoelace area (positive for the CCW polygons this module constructs)."""
    return _signed_area(polygon.vertices)


def point_in_polygon(point: Array, polygon: Polygon) -> bool:
    """Ray-casting containment test; boundary points count as inside."""
    x, y = float(point[0]), float(point[1])
    verts = polygon.vertices
    m = len(verts)
    inside = False
    for i in range(m):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % m]
        # boundary check on this edge
        cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
        if cross == 0 and min(x1, x2) <= x <= max(x1, x2) and min(y1, y2) <= y <= max(y1, y2):
            return True
        if (y1 > y) != (y2 > y):
            x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < x_cross:
                inside = not inside
    return inside


def points_in_polygon(points: Array, polygon: Polygon) -> Array:
    """Vectorized ray-casting containment for an (n, 2) array; boundary inside."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    x = pts[:, 0]
    y = pts[:, 1]
    verts = polygon.vertices
    m = len(verts)
    inside = np.zeros(len(pts), dtype=bool)
    boundary = np.zeros(len(pts), dtype=bool)
    for i in range(m):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % m]
        cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
        on = (
            (cross == 0)
            & (np.minimum(x1, x2) <= x)
            & (x <= np.maximum(x1, x2))
            & (np.minimum(y1, y2) <= y)
            & (y <= np.maximum(y1, y2))
        )
        boundary |= on
        hits = (y1 > y) != (y2 > y)
        if np.any(hits):
            x_cross = x1 + (y[hits] - y1) * (x2 - x1) / (y2 - y1)
            flip = np.zeros(len(pts), dtype=bool)
            flip[hits] = x[hits] < x_cross
            inside ^= flip
    return inside | boundary


def _square_extent(lo: Array, hi: Array) -> tuple:
    """Tight bounding box padded symmetrically to a square (origin, width)."""
    span = hi - lo
    width = float(max(span[0], span[1]))
    if width <= 0:
        width = 1.0  # degenerate source: give it a unit extent
    pad = (width - span) / 2.0
    return lo - pad, width


def rasterize(source, side: int) -> BinaryMask:
    """Occupancy grid over the source's bounding box padded to a square.

    A cell is occupied when it contains at least one point (point cloud) or
    its center lies inside the polygon.
    """
    if side < 2:
        raise ValueError("raster side must be at least 2")
    if isinstance(source, PointCloud):
        if source.dim != 2:
            raise ValueError("rasterization is 2-D only")
        pts = source.points
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        origin, width = _square_extent(lo, hi)
        cell = width / side
        ij = np.floor((pts - origin) / cell).astype(int)
        ij = np.clip(ij, 0, side - 1)  # points on the far extent edge
        cells = np.zeros((side, side), dtype=bool)
        cells[ij[:, 0], ij[:, 1]] = True
        return BinaryMask(cells, origin, width)
    if isinstance(source, Polygon):
        verts = source.vertices
        origin, width = _square_extent(verts.min(axis=0), verts.max(axis=0))
        mask = BinaryMask(np.ones((side, side), dtype=bool), origin, width)
        centers = mask.cell_centers().reshape(-1, 2)
        occupied = points_in_polygon(centers, source).reshape(side, side)
        return BinaryMask(occupied, origin, width)
    raise TypeError(f"cannot rasterize {type(source).__name__}")


def fill_sampling_gaps(mask: BinaryMask, min_neighbors: int = 5) -> BinaryMask:
    """Occupy empty cells with at least ``min_neighbors`` occupied 8-neighbors.

    Finite point samples leave isolated empty cells inside and along the rim
    of a shape; those gaps read as short-lived tubular components. One fill
    pass removes them without touching dents wider than one cell.
    """
    if min_neighbors < 1:
        return mask
    c = mask.side
    padded = np.zeros((c + 2, c + 2), dtype=np.int64)
    padded[1:-1, 1:-1] = mask.cells
    counts = sum(
        padded[1 + di : c + 1 + di, 1 + dj : c + 1 + dj]
        for di in (-1, 0, 1)
        for dj in (-1, 0, 1)
        if (di, dj) != (0, 0)
    )
    filled = mask.cells | (counts >= min_neighbors)
    return BinaryMask(filled, mask.origin, mask.width)


def convexity_measure(mask: BinaryMask) -> float:
    """Occupied area divided by the hull area of the occupied cell centers.

    Clamped to at most 1 (the center hull slightly underestimates the true
    region, so ratios marginally above 1 occur for convex shapes).
    """
    centers = mask.occupied_centers()
    try:
        hull = convex_hull(centers)
    except ValueError as exc:
        raise ValueError(f"degenerate mask for convexity measure: {exc}") from exc
    area = centers.shape[0] * mask.cell_size**2
    return min(1.0, area / polygon_area(hull))
