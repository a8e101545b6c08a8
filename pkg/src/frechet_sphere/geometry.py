"""Exact geometry of spherical triangles on the unit 2-sphere.

Points on the sphere are plain ``numpy`` arrays of shape ``(3,)``; batches of
points are arrays of shape ``(n, 3)``.  Triangles are immutable and carry a
``rank`` used only to make orderings reproducible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

# Membership slack: boundary points are claimed by every adjacent triangle.
TAU_MEM = 1e-12
DET_TOL = 1e-12

_EDGES = ((0, 1), (1, 2), (2, 0))
_rank_counter = itertools.count()


class GeometryError(ValueError):
    """Raised on degenerate input (coplanar vertices, antipodal arcs, ...)."""


def unit(v) -> np.ndarray:
    """Return ``v`` rescaled to unit length as a float array."""
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm < 1e-12:
        raise GeometryError("cannot normalize a (near) zero vector")
    return v / norm


def arc_distance(a, b) -> float:
    """Great-circle distance ``arccos <a, b>`` in radians."""
    return float(np.arccos(np.clip(np.dot(a, b), -1.0, 1.0)))


def arc_distances(x: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Vectorised :func:`arc_distance` from ``x`` to each row of ``points``."""
    return np.arccos(np.clip(points @ x, -1.0, 1.0))


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # np.cross carries heavy per-call overhead for single 3-vectors
    return np.array([a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])


def _angle(a: np.ndarray, b: np.ndarray) -> float:
    # atan2 form stays accurate for tiny separations where arccos does not
    c = _cross(a, b)
    return math.atan2(math.sqrt(c @ c), a @ b)


@dataclass(frozen=True, eq=False)
class SphericalTriangle:
    """Closed spherical triangle spanned by three non-coplanar unit vertices."""

    vertices: np.ndarray
    rank: int = field(default_factory=lambda: next(_rank_counter))

    def __post_init__(self):
        verts = np.array(self.vertices, dtype=float).reshape(3, 3)
        verts /= np.linalg.norm(verts, axis=1, keepdims=True)
        if abs(np.linalg.det(verts)) <= DET_TOL:
            raise GeometryError("triangle vertices are coplanar")
        dots = (verts[0] @ verts[1], verts[1] @ verts[2], verts[2] @ verts[0])
        if min(dots) < -1e-9:
            raise GeometryError("triangle side longer than a quarter circle")
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)

    def __repr__(self):
        return f"SphericalTriangle(rank={self.rank}, vertices={self.vertices.tolist()})"

    @cached_property
    def sides(self) -> np.ndarray:
        """Lengths of edges (0,1), (1,2), (2,0)."""
        d = self.vertices
        return np.array([_angle(d[i], d[j]) for i, j in _EDGES])

    @cached_property
    def inward_normals(self) -> np.ndarray:
        """Rows are unit normals of the edge planes, oriented toward the third vertex."""
        d = self.vertices
        normals = np.empty((3, 3))
        for row, (i, j) in enumerate(_EDGES):
            k = 3 - i - j
            n = unit(_cross(d[i], d[j]))
            normals[row] = n if d[k] @ n >= 0 else -n
        return normals


def contains_point_barycentric(t: SphericalTriangle, x, tol: float = TAU_MEM) -> bool:
    """Membership by solving ``sum(lambda_i d_i) = x`` for non-negative weights."""
    matrix = t.vertices.T
    if abs(np.linalg.det(matrix)) <= DET_TOL:
        raise GeometryError("singular vertex system")
    lam = np.linalg.solve(matrix, np.asarray(x, dtype=float))
    return bool(np.all(lam >= -tol))


def contains_point_halfspace(t: SphericalTriangle, x, tol: float = TAU_MEM) -> bool:
    """Membership via the three inward edge normals."""
    return bool(np.all(t.inward_normals @ np.asarray(x, dtype=float) >= -tol))


def contains_points(t: SphericalTriangle, points: np.ndarray, tol: float = TAU_MEM) -> np.ndarray:
    """Vectorised halfspace membership for an ``(n, 3)`` array."""
    return np.all(points @ t.inward_normals.T >= -tol, axis=1)


def _edge_frame(di, dj) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    di = np.asarray(di, dtype=float)
    dj = np.asarray(dj, dtype=float)
    if abs(np.dot(di, dj)) >= 1.0 - 1e-12:
        raise GeometryError("arc endpoints are parallel or antipodal")
    return di, dj, _cross(di, dj)


def batch_wedge_membership(di, dj, points, tol: float = TAU_MEM) -> np.ndarray:
    """For each point decide whether its projection onto the plane of
    ``di, dj`` falls on the short arc between them.

    The 3x3 matrix ``(di | dj | di x dj)`` is QR-factorised once; every point
    then costs one ``Q^T x`` product and a back substitution.
    """
    di, dj, cross = _edge_frame(di, dj)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return _wedge(points, di, dj, cross, tol)


def qr3(columns: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Thin QR of a 3x3 matrix by modified Gram-Schmidt.

    Cheaper than ``np.linalg.qr`` for a single tiny matrix; ``R`` has a
    positive diagonal.
    """
    q = np.array(columns, dtype=float)
    r = np.zeros((3, 3))
    for k in range(3):
        for i in range(k):
            r[i, k] = q[:, i] @ q[:, k]
            q[:, k] -= r[i, k] * q[:, i]
        r[k, k] = math.sqrt(q[:, k] @ q[:, k])
        q[:, k] /= r[k, k]
    return q, r


def _wedge(points, di, dj, cross, tol):
    q, r = qr3(np.column_stack((di, dj, cross)))
    y = points @ q
    lam3 = y[:, 2] / r[2, 2]
    lam2 = (y[:, 1] - r[1, 2] * lam3) / r[1, 1]
    lam1 = (y[:, 0] - r[0, 1] * lam2 - r[0, 2] * lam3) / r[0, 0]
    return (lam1 >= -tol) & (lam2 >= -tol)


def _arc_distances(points: np.ndarray, di, dj, tol: float) -> np.ndarray:
    di, dj, cross = _edge_frame(di, dj)
    wedge = _wedge(points, di, dj, cross, tol)
    normal = cross / math.sqrt(cross @ cross)
    to_circle = np.abs(np.arcsin(np.clip(points @ normal, -1.0, 1.0)))
    to_ends = np.minimum(arc_distances(di, points), arc_distances(dj, points))
    return np.where(wedge, to_circle, to_ends)


def dist_to_arc(x, di, dj, tol: float = TAU_MEM) -> float:
    """Distance from ``x`` to the short great-circle arc from ``di`` to ``dj``."""
    x = np.asarray(x, dtype=float).reshape(1, 3)
    return float(_arc_distances(x, di, dj, tol)[0])


def distances_to_triangle(points: np.ndarray, t: SphericalTriangle, tol: float = TAU_MEM) -> np.ndarray:
    """Distance from each row of ``points`` to the closed triangle ``t``."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    inside = contains_points(t, points, tol)
    out = np.zeros(len(points))
    if inside.all():
        return out
    outside = points[~inside]
    d = t.vertices
    edge_dists = [_arc_distances(outside, d[i], d[j], tol) for i, j in _EDGES]
    out[~inside] = np.minimum.reduce(edge_dists)
    return out


def dist_to_triangle(x, t: SphericalTriangle, tol: float = TAU_MEM) -> float:
    """Distance from ``x`` to ``t``; zero when ``x`` lies in the triangle."""
    return float(distances_to_triangle(np.asarray(x, dtype=float), t, tol)[0])


def centroid(t: SphericalTriangle) -> np.ndarray:
    s = t.vertices.sum(axis=0)
    norm = np.linalg.norm(s)
    if norm < 1e-12:
        raise GeometryError("vertex sum vanishes; centroid undefined")
    return s / norm


def diameter(t: SphericalTriangle) -> float:
    """Largest vertex-to-vertex distance.

    Every triangle produced here sits inside a closed octant, where this is
    the geodesic diameter of the whole triangle.
    """
    return float(t.sides.max())


def triangle_area(t: SphericalTriangle) -> float:
    """Spherical excess from the side lengths (l'Huilier)."""
    a, b, c = t.sides
    s = 0.5 * (a + b + c)
    prod = np.tan(s / 2) * np.tan((s - a) / 2) * np.tan((s - b) / 2) * np.tan((s - c) / 2)
    return float(4.0 * np.arctan(np.sqrt(max(prod, 0.0))))


def longest_edge(t: SphericalTriangle, tie_tol: float = 1e-12) -> tuple[int, int]:
    """Index pair of the longest edge; ties go to the smallest index pair."""
    sides = t.sides
    longest = sides.max()
    candidates = [tuple(sorted(_EDGES[k])) for k in range(3) if sides[k] >= longest - tie_tol]
    return min(candidates)


def bisect_longest_edge(t: SphericalTriangle) -> tuple[SphericalTriangle, SphericalTriangle]:
    """Split ``t`` at the geodesic midpoint of its longest edge.

    With split edge ``(d_i, d_j)`` (stored order) and opposite vertex ``d_k``
    the children are ``(d_i, m, d_k)`` and ``(m, d_j, d_k)``.
    """
    i, j = longest_edge(t)
    k = 3 - i - j
    d = t.vertices
    if np.dot(d[i], d[j]) <= -1.0 + 1e-12:
        raise GeometryError("cannot bisect an antipodal edge")
    mid = unit(d[i] + d[j])
    first = SphericalTriangle(np.array([d[i], mid, d[k]]))
    second = SphericalTriangle(np.array([mid, d[j], d[k]]))
    return first, second


def octahedral_triangulation() -> list[SphericalTriangle]:
    """The eight octant triangles of the inscribed regular octahedron.

    Octants are enumerated with sign patterns in lexicographic order
    ``(+,+,+), (+,+,-), ...``; each triangle is positively oriented.
    """
    triangles = []
    for sx, sy, sz in itertools.product((1.0, -1.0), repeat=3):
        verts = np.diag([sx, sy, sz])
        if np.linalg.det(verts) < 0:
            verts = verts[[1, 0, 2]]
        triangles.append(SphericalTriangle(verts))
    return triangles
