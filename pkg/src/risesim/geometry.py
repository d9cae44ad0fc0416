"""Planar geometry: buildings, structure poses, occlusion and local angles.

All heights are equal, so everything lives in the horizontal plane. A
structure's local frame has its z axis along the panel normal and its x axis
in the plane, rotated +90 degrees from the normal. Points in the horizontal
plane therefore always have azimuth ``phi`` of exactly 0 or pi in that frame.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

# Distance below which a point counts as lying on a building boundary.
BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite, got ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y

    def distance(self, other: Point2) -> float:
        return math.hypot(other.x - self.x, other.y - self.y)


def _as_point(p) -> Point2:
    return p if isinstance(p, Point2) else Point2(float(p[0]), float(p[1]))


def _segments_cross(p1, p2, q1, q2) -> bool:
    """True if closed segments p1p2 and q1q2 share any point."""

    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return (v > 0) - (v < 0)

    def on_seg(a, b, c):
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    return (
        (o1 == 0 and on_seg(p1, p2, q1))
        or (o2 == 0 and on_seg(p1, p2, q2))
        or (o3 == 0 and on_seg(q1, q2, p1))
        or (o4 == 0 and on_seg(q1, q2, p2))
    )


@dataclass(frozen=True)
class Building:
    """Simple polygon footprint with counter-clockwise vertex order."""

    vertices: tuple[Point2, ...]

    def __post_init__(self):
        verts = tuple(_as_point(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        n = len(verts)
        if n < 3:
            raise ValueError(f"building needs at least 3 vertices, got {n}")
        if self.signed_area() <= 0:
            raise ValueError("building vertices must be in counter-clockwise order")
        pts = [(v.x, v.y) for v in verts]
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if _segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]):
                    raise ValueError(f"building polygon self-intersects (edges {i} and {j})")

    @classmethod
    def rectangle(cls, xmin: float, ymin: float, xmax: float, ymax: float) -> Building:
        return cls(((xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)))

    def signed_area(self) -> float:
        s = 0.0
        n = len(self.vertices)
        for i in range(n):
            a, b = self.vertices[i], self.vertices[(i + 1) % n]
            s += a.x * b.y - b.x * a.y
        return 0.5 * s

    def as_array(self) -> np.ndarray:
        return np.array([(v.x, v.y) for v in self.vertices], dtype=float)


class StructureKind(str, enum.Enum):
    SURFACE_REFLECTIVE = "surface_reflective"
    EDGE_TRANSMISSIVE = "edge_transmissive"
    EDGE_DEE = "edge_dee"

    @property
    def fed_from_behind(self) -> bool:
        """Edge structures take the base-station wave on their back face."""
        return self is not StructureKind.SURFACE_REFLECTIVE


@dataclass(frozen=True)
class StructurePose:
    position: Point2
    normal_azimuth: float
    kind: StructureKind = StructureKind.SURFACE_REFLECTIVE

    def __post_init__(self):
        object.__setattr__(self, "position", _as_point(self.position))
        object.__setattr__(self, "kind", StructureKind(self.kind))
        if not math.isfinite(self.normal_azimuth):
            raise ValueError("normal_azimuth must be finite")
        az = math.fmod(self.normal_azimuth, TWO_PI) % TWO_PI
        object.__setattr__(self, "normal_azimuth", 0.0 if az == TWO_PI else az)


@dataclass(frozen=True)
class LocalAngles:
    """Spherical angles in a structure's local frame (phi is 0 or pi)."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if self.phi != 0.0 and self.phi != math.pi:
            raise ValueError(f"phi must be exactly 0 or pi in the horizontal plane, got {self.phi}")

    @classmethod
    def from_signed(cls, angle: float) -> LocalAngles:
        """Build from an angle measured from the normal, positive toward local +x."""
        return cls(abs(angle), 0.0 if angle >= 0 else math.pi)

    @property
    def signed(self) -> float:
        return self.theta if self.phi == 0.0 else -self.theta

    @property
    def cosines(self) -> tuple[float, float]:
        """Direction cosines ``(sin t cos p, sin t sin p)`` along the local x and y axes.

        ``sin p`` is exactly zero for the two admissible azimuths, so the second
        entry is returned as an exact 0.0 rather than ``sin(pi)`` rounding noise.
        """
        s = math.sin(self.theta)
        return (s if self.phi == 0.0 else -s), 0.0


@dataclass(frozen=True)
class LinkGeometry:
    d_1: float
    d_2: float
    incident: LocalAngles
    scattered: LocalAngles
    bs_visible: bool = True
    user_visible: bool = True
    # global azimuth of the structure -> user direction
    scattered_azimuth: float = 0.0

    def __post_init__(self):
        if not (self.d_1 > 0 and self.d_2 > 0):
            raise ValueError("link distances must be positive")


@dataclass(frozen=True)
class Region:
    """Axis-aligned target rectangle sampled on a square grid."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float
    resolution: float

    def __post_init__(self):
        if not self.resolution > 0:
            raise ValueError(f"region resolution must be positive, got {self.resolution}")
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError("region must have positive width and height")

    @property
    def shape(self) -> tuple[int, int]:
        """(rows, cols) of the sampling grid."""
        # guard against e.g. 1.1 / 0.1 = 11.000000000000002
        cols = math.ceil((self.xmax - self.xmin) / self.resolution - 1e-9)
        rows = math.ceil((self.ymax - self.ymin) / self.resolution - 1e-9)
        return max(rows, 1), max(cols, 1)


def grid_points(region: Region, resolution: float | None = None) -> np.ndarray:
    """Cell-centre sample points of ``region``, row-major from (xmin, ymin).

    Returns an array of shape (rows * cols, 2); x varies fastest.
    """
    if resolution is not None and resolution != region.resolution:
        region = Region(region.xmin, region.ymin, region.xmax, region.ymax, resolution)
    rows, cols = region.shape
    res = region.resolution
    xs = region.xmin + (np.arange(cols) + 0.5) * res
    ys = region.ymin + (np.arange(rows) + 0.5) * res
    gx, gy = np.meshgrid(xs, ys)
    return np.column_stack([gx.ravel(), gy.ravel()])


# ---------------------------------------------------------------------------
# occlusion


def _strictly_inside(points: np.ndarray, verts: np.ndarray, tol: float = BOUNDARY_TOL) -> np.ndarray:
    """Even-odd point-in-polygon test that treats the boundary as outside."""
    x = points[..., 0]
    y = points[..., 1]
    inside = np.zeros(x.shape, dtype=bool)
    near_edge = np.zeros(x.shape, dtype=bool)
    nxt = np.roll(verts, -1, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        for (xi, yi), (xj, yj) in zip(verts, nxt):
            crosses = (yi > y) != (yj > y)
            x_at = (xj - xi) * (y - yi) / (yj - yi) + xi
            inside ^= crosses & (x < x_at)
            ex, ey = xj - xi, yj - yi
            t = np.clip(((x - xi) * ex + (y - yi) * ey) / (ex * ex + ey * ey), 0.0, 1.0)
            dx = x - xi - t * ex
            dy = y - yi - t * ey
            near_edge |= dx * dx + dy * dy <= tol * tol
    return inside & ~near_edge


def _segments_blocked_by(a: np.ndarray, b: np.ndarray, verts: np.ndarray) -> np.ndarray:
    """Open segments a->b that pass through the interior of one polygon.

    The segment is cut at every parameter where it can meet the boundary (edge
    crossings and projections of the vertices). Between consecutive cuts it is
    wholly inside, outside or on the boundary, so testing each piece's
    midpoint decides the question. Extra cuts are harmless.
    """
    d = b - a
    l2 = np.einsum("ij,ij->i", d, d)
    e = np.roll(verts, -1, axis=0) - verts
    va_x = verts[None, :, 0] - a[:, None, 0]
    va_y = verts[None, :, 1] - a[:, None, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        t_vert = (va_x * d[:, None, 0] + va_y * d[:, None, 1]) / l2[:, None]
        denom = d[:, None, 0] * e[None, :, 1] - d[:, None, 1] * e[None, :, 0]
        t_edge = (va_x * e[None, :, 1] - va_y * e[None, :, 0]) / denom
    t_edge = np.where(denom != 0, t_edge, 0.0)
    n = a.shape[0]
    cuts = np.concatenate(
        [np.zeros((n, 1)), np.ones((n, 1)), np.clip(t_vert, 0.0, 1.0), np.clip(t_edge, 0.0, 1.0)],
        axis=1,
    )
    cuts = np.nan_to_num(cuts, nan=0.0)
    cuts.sort(axis=1)
    length = np.diff(cuts, axis=1)
    mid = 0.5 * (cuts[:, :-1] + cuts[:, 1:])
    pts = a[:, None, :] + mid[..., None] * d[:, None, :]
    inside = _strictly_inside(pts, verts) & (length > 1e-12)
    return inside.any(axis=1)


def segments_blocked(a, b, buildings: Iterable[Building]) -> np.ndarray:
    """Vectorised occlusion: which open segments a[i]->b[i] enter a building interior.

    ``a`` and ``b`` broadcast against each other and have shape (..., 2).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a, b = np.broadcast_arrays(a, b)
    shape = a.shape[:-1]
    a = a.reshape(-1, 2)
    b = b.reshape(-1, 2)
    out = np.zeros(a.shape[0], dtype=bool)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    for bld in buildings:
        verts = bld.as_array()
        bmin, bmax = verts.min(axis=0), verts.max(axis=0)
        cand = ~out & np.all(hi > bmin, axis=1) & np.all(lo < bmax, axis=1)
        if cand.any():
            out[cand] = _segments_blocked_by(a[cand], b[cand], verts)
    return out.reshape(shape)


def inside_any(points, buildings: Iterable[Building]) -> np.ndarray:
    """Which points lie strictly inside some building."""
    pts = np.asarray(points, dtype=float)
    out = np.zeros(pts.shape[:-1], dtype=bool)
    for bld in buildings:
        out |= _strictly_inside(pts, bld.as_array())
    return out


def _buildings_of(obj) -> Sequence[Building]:
    return getattr(obj, "buildings", obj)


def los_blocked(a, b, scene) -> bool:
    """True iff the open segment a-b intersects the interior of any building.

    ``scene`` may be a Scene or a plain sequence of buildings. Running along a
    wall or touching a corner does not block.
    """
    a, b = _as_point(a), _as_point(b)
    if a == b:
        raise ValueError("line-of-sight endpoints must differ")
    return bool(segments_blocked((a.x, a.y), (b.x, b.y), _buildings_of(scene)))


# ---------------------------------------------------------------------------
# local angles


def signed_angles(pose: StructurePose, points) -> np.ndarray:
    """Angle from the panel normal to each point, positive toward local +x, in [-pi, pi]."""
    pts = np.asarray(points, dtype=float)
    ux = pts[..., 0] - pose.position.x
    uy = pts[..., 1] - pose.position.y
    nx, ny = math.cos(pose.normal_azimuth), math.sin(pose.normal_azimuth)
    cross = nx * uy - ny * ux
    dot = nx * ux + ny * uy
    # -0.0 cross would otherwise map "straight behind" to -pi
    return np.where(cross >= 0, 1.0, -1.0) * np.abs(np.arctan2(cross, dot))


def local_angles(pose: StructurePose, external_point, facing: str = "front") -> LocalAngles:
    """Local (theta, phi) of ``external_point`` as seen from the structure.

    With ``facing="back"`` theta is measured from the reversed normal while phi
    keeps the panel's own x axis, which is what a transmissive panel's phase
    gradient sees for a wave arriving on its back face.
    """
    p = _as_point(external_point)
    if p == pose.position:
        raise ValueError("point coincides with the structure position")
    s = float(signed_angles(pose, (p.x, p.y)))
    if facing == "front":
        return LocalAngles.from_signed(s)
    if facing == "back":
        return LocalAngles(math.pi - abs(s), 0.0 if s >= 0 else math.pi)
    raise ValueError(f"facing must be 'front' or 'back', got {facing!r}")
