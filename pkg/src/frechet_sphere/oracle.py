"""Brute-force reference answers used to cross-check the solver and the bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frechet import DataSet, FrechetParams, frechet_values, lipschitz_slack
from .geometry import SphericalTriangle, arc_distances


@dataclass(frozen=True)
class GridSpec:
    resolution: float = 0.02

    def __post_init__(self):
        if not 0 < self.resolution <= 0.2:
            raise ValueError(f"grid resolution must lie in (0, 0.2], got {self.resolution}")

    @property
    def size(self) -> int:
        return math.ceil((4.0 / self.resolution) ** 2)


@dataclass
class GridResult:
    minimizers: np.ndarray
    min_value: float
    slack: float
    nodes: int


def fibonacci_sphere(count: int) -> np.ndarray:
    """``count`` quasi-uniform unit vectors on a Fibonacci spiral."""
    k = np.arange(count) + 0.5
    z = 1.0 - 2.0 * k / count
    r = np.sqrt(1.0 - z * z)
    phi = k * math.pi * (3.0 - math.sqrt(5.0))
    return np.column_stack((r * np.cos(phi), r * np.sin(phi), z))


def grid_minimize(data: DataSet, params: FrechetParams, grid: GridSpec = GridSpec()) -> GridResult:
    """Evaluate the objective on a Fibonacci lattice and keep the near-minimal nodes.

    ``min_value`` over-estimates the true minimum by at most ``slack``.  The
    returned minimisers are the nodes whose value is within
    ``resolution**p`` of ``min_value``.
    """
    nodes = fibonacci_sphere(grid.size)
    values = frechet_values(nodes, data, params)
    best = float(values.min())
    keep = values <= best + grid.resolution ** params.p
    return GridResult(nodes[keep], best, lipschitz_slack(params.p, grid.resolution), len(nodes))


def sample_triangle(t: SphericalTriangle, samples: int) -> np.ndarray:
    """Deterministic quasi-random points of ``t``: normalised convex combinations
    of its vertices over a uniform barycentric lattice (including the boundary)."""
    side = max(1, math.ceil((math.sqrt(8 * samples + 1) - 3) / 2))
    i, j = np.triu_indices(side + 1)
    a = (side - j) / side
    b = (j - i) / side
    c = i / side
    weights = np.column_stack((a, b, c))
    pts = weights @ t.vertices
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def sample_triangle_min_distance(x, t: SphericalTriangle, samples: int = 1000) -> float:
    """Smallest distance from ``x`` to a sampled point of ``t`` (an upper bound
    on the true distance)."""
    if samples < 10:
        raise ValueError("need at least 10 samples")
    return float(arc_distances(np.asarray(x, dtype=float), sample_triangle(t, samples)).min())
