"""Frechet-p objective and its lower bound over a spherical triangle."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import TAU_MEM, SphericalTriangle, arc_distances, distances_to_triangle

# Discard only when the bound beats the incumbent by more than rounding noise.
TAU_NUM = 1e-12


@dataclass(frozen=True, eq=False)
class DataSet:
    """Immutable sample ``x_1, ..., x_n`` on the sphere, stored as an ``(n, 3)`` array."""

    points: np.ndarray
    label: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1 and pts.size == 3:
            pts = pts.reshape(1, 3)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"points must have shape (n, 3), got {pts.shape}")
        if len(pts) == 0:
            raise ValueError("a data set needs at least one point")
        norms = np.linalg.norm(pts, axis=1)
        if np.any(norms < 1e-12):
            raise ValueError("zero vector in data set")
        pts /= norms[:, None]
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class FrechetParams:
    p: float = 2.0

    def __post_init__(self):
        if not self.p >= 0:
            raise ValueError(f"exponent p must be >= 0, got {self.p}")


def _power(dist: np.ndarray, p: float) -> np.ndarray:
    # 0**0 is taken as 0: with p = 0 the objective counts points distinct from m
    if p == 0:
        return (dist > 0).astype(float)
    return dist**p


def frechet_value(m, data: DataSet, params: FrechetParams) -> float:
    """Mean of ``d(m, x_i)**p`` over the data."""
    m = np.asarray(m, dtype=float)
    return float(np.mean(_power(arc_distances(m, data.points), params.p)))


def frechet_values(ms: np.ndarray, data: DataSet, params: FrechetParams, chunk: int = 4096) -> np.ndarray:
    """:func:`frechet_value` for every row of ``ms``."""
    ms = np.atleast_2d(np.asarray(ms, dtype=float))
    out = np.empty(len(ms))
    for start in range(0, len(ms), chunk):
        block = ms[start:start + chunk]
        d = np.arccos(np.clip(block @ data.points.T, -1.0, 1.0))
        out[start:start + chunk] = _power(d, params.p).mean(axis=1)
    return out


def lower_bound(t: SphericalTriangle, data: DataSet, params: FrechetParams, tol: float = TAU_MEM) -> float:
    """Mean of ``dist(x_i, t)**p``; never exceeds the objective anywhere on ``t``."""
    return float(np.mean(_power(distances_to_triangle(data.points, t, tol), params.p)))


def can_discard(bound_u: float, incumbent_v: float, tol: float = TAU_NUM) -> bool:
    """True when a cell with lower bound ``bound_u`` cannot hold a minimiser."""
    return bound_u > incumbent_v + tol


def lipschitz_slack(p: float, resolution: float) -> float:
    """Worst-case change of the objective over a displacement of ``resolution``.

    ``d**p`` is Lipschitz with constant ``p * pi**(p-1)`` on ``[0, pi]`` for
    ``p >= 1`` and Hoelder of order ``p`` with constant 1 otherwise.
    """
    if p >= 1:
        return p * np.pi ** (p - 1) * resolution
    return resolution**p
