"""Spherical branch and bound for the complete set of Frechet-p-means.

The solver keeps the work list ``L`` in insertion order and indexes it with
lazily-pruned heaps, so "first element attaining the minimum" lookups and the
discard sweep do not scan the whole list on every iteration.
"""

from __future__ import annotations

import heapq
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .frechet import TAU_NUM, DataSet, FrechetParams, can_discard, frechet_value, lower_bound
from .geometry import (
    TAU_MEM,
    SphericalTriangle,
    bisect_longest_edge,
    centroid,
    diameter,
    distances_to_triangle,
    octahedral_triangulation,
    triangle_area,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class WorkItem:
    """A list entry: triangle, diameter ``s``, centroid value ``v``, lower bound ``u``."""

    triangle: SphericalTriangle
    s: float
    v: float
    u: float
    seq: int = -1

    @property
    def centroid(self) -> np.ndarray:
        return centroid(self.triangle)


@dataclass(frozen=True)
class SolverConfig:
    params: FrechetParams = field(default_factory=FrechetParams)
    eps: float = 0.1
    delta: float = 0.1
    max_iterations: int = 1_000_000  # 0 means unlimited
    tau_mem: float = TAU_MEM
    tau_num: float = TAU_NUM
    prune: bool = True

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")


@dataclass
class SolverStats:
    iterations: int = 0
    branch_count: int = 0
    discard_count: int = 0
    wall_time: float = 0.0
    best_value: float = math.inf
    truncated: bool = False


@dataclass
class ApproximationSet:
    """Accepted cells forming the (eps, delta)-approximation plus run statistics."""

    items: list[WorkItem] = field(default_factory=list)
    stats: SolverStats = field(default_factory=SolverStats)

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    @property
    def triangles(self) -> list[SphericalTriangle]:
        return [item.triangle for item in self.items]

    @property
    def centroids(self) -> np.ndarray:
        if not self.items:
            return np.empty((0, 3))
        return np.array([item.centroid for item in self.items])


class EmptyWorkListError(LookupError):
    pass


class SolverState:
    """Work list ``L`` plus the scalars threaded through the main loop.

    Items are kept in a dict keyed by their insertion sequence number, which
    preserves list order.  Three heaps over ``(u, seq)``, ``(v, seq)`` and
    ``(-u, seq)`` answer first-minimum and discard queries; entries for items
    that have left the list are skipped on access.
    """

    def __init__(self):
        self.work_list: dict[int, WorkItem] = {}
        self._by_u: list[tuple[float, int]] = []
        self._by_v: list[tuple[float, int]] = []
        self._by_neg_u: list[tuple[float, int]] = []
        self._next_seq = 0
        self.current: WorkItem | None = None
        self.incumbent: WorkItem | None = None
        self.u_star = -math.inf
        self.v_act = math.inf
        self.v_glob = math.inf
        self.accepted = ApproximationSet()

    def __len__(self):
        return len(self.work_list)

    def __contains__(self, item: WorkItem | None) -> bool:
        return item is not None and self.work_list.get(item.seq) is item

    def append(self, triangle: SphericalTriangle, s: float, v: float, u: float) -> WorkItem:
        item = WorkItem(triangle, s, v, u, self._next_seq)
        self._next_seq += 1
        self.work_list[item.seq] = item
        heapq.heappush(self._by_u, (u, item.seq))
        heapq.heappush(self._by_v, (v, item.seq))
        heapq.heappush(self._by_neg_u, (-u, item.seq))
        return item

    def remove(self, item: WorkItem) -> None:
        del self.work_list[item.seq]

    def _peek(self, heap: list[tuple[float, int]]) -> WorkItem:
        while heap:
            seq = heap[0][1]
            if seq in self.work_list:
                return self.work_list[seq]
            heapq.heappop(heap)
        raise EmptyWorkListError("work list is empty")

    def first_min_u(self) -> WorkItem:
        return self._peek(self._by_u)

    def first_min_v(self) -> WorkItem:
        return self._peek(self._by_v)

    def purge_above(self, threshold: float) -> int:
        """Drop every item with ``u > threshold``; return how many went."""
        removed = 0
        heap = self._by_neg_u
        while heap:
            neg_u, seq = heap[0]
            if seq not in self.work_list:
                heapq.heappop(heap)
            elif -neg_u > threshold:
                heapq.heappop(heap)
                del self.work_list[seq]
                removed += 1
            else:
                break
        return removed


def select_next(state: SolverState) -> WorkItem:
    """Earliest-inserted work item attaining the smallest lower bound."""
    return state.first_min_u()


def measure(approx: ApproximationSet) -> float:
    """Total area of the accepted triangles as a fraction of the sphere."""
    return sum(triangle_area(item.triangle) for item in approx.items) / (4 * math.pi)


class _Evaluator:
    def __init__(self, data: DataSet, config: SolverConfig):
        self.data = data
        self.config = config
        self.best_value = math.inf

    def __call__(self, triangle: SphericalTriangle) -> tuple[float, float, float]:
        params = self.config.params
        v = frechet_value(centroid(triangle), self.data, params)
        u = lower_bound(triangle, self.data, params, self.config.tau_mem)
        self.best_value = min(self.best_value, v)
        return diameter(triangle), v, u


def solve(data: DataSet, config: SolverConfig | None = None, log_every: int = 0) -> ApproximationSet:
    """Compute an (eps, delta)-approximation of all Frechet-p-means of ``data``.

    Returns the accepted cells.  If ``config.max_iterations`` is hit the
    result carries ``stats.truncated = True`` and is not a valid
    approximation.
    """
    if data is None or len(data) == 0:
        raise ValueError("cannot solve for an empty data set")
    config = config or SolverConfig()
    start = time.perf_counter()
    evaluate = _Evaluator(data, config)
    state = SolverState()
    stats = state.accepted.stats
    tol = config.tau_num
    half_eps = config.eps / 2

    for tri in octahedral_triangulation():
        state.append(tri, *evaluate(tri))
    state.current = next(iter(state.work_list.values()))
    state.incumbent = state.current

    while state.work_list:
        if config.max_iterations and stats.iterations >= config.max_iterations:
            stats.truncated = True
            break
        stats.iterations += 1
        if log_every and stats.iterations % log_every == 0:
            log.info("iteration %d: |L|=%d |A|=%d v_glob=%.6g",
                     stats.iterations, len(state), len(state.accepted), state.v_glob)

        if state.current in state:
            state.remove(state.current)
        children = bisect_longest_edge(state.current.triangle)
        stats.branch_count += 1

        for child in children:
            s, v, u = evaluate(child)
            if can_discard(u, state.v_glob, tol):
                stats.discard_count += 1
                continue
            item = state.append(child, s, v, u)
            if v <= state.v_act:
                state.incumbent = item
                state.v_act = v
                state.v_glob = min(state.v_act, state.v_glob)
                if config.prune:
                    stats.discard_count += state.purge_above(state.v_glob + tol)

        if not state.work_list:
            break
        state.current = select_next(state)
        state.u_star = state.current.u
        while state.work_list and state.v_act - state.u_star <= half_eps:
            incumbent = state.incumbent
            if incumbent in state and incumbent.s <= config.delta:
                state.accepted.items.append(incumbent)
                state.remove(incumbent)
            if incumbent in state:
                # branch the incumbent next
                state.current = incumbent
                break
            if state.work_list:
                state.current = select_next(state)
                state.u_star = state.current.u
                state.incumbent = state.first_min_v()
                state.v_act = state.incumbent.v

    stats.best_value = evaluate.best_value
    stats.wall_time = time.perf_counter() - start
    return state.accepted


def _arc_overlap(a, b, c, d, tol: float) -> bool:
    # arcs a-b and c-d lie on one great circle; do they share positive length?
    normal = np.cross(a, b)
    w = np.cross(normal / np.linalg.norm(normal), a)
    theta_b = math.atan2(b @ w, b @ a)
    theta_c = math.atan2(c @ w, c @ a)
    theta_d = math.atan2(d @ w, d @ a)
    lo = max(0.0, min(theta_c, theta_d))
    hi = min(theta_b, max(theta_c, theta_d))
    return hi - lo > tol


_EDGE_PAIRS = ((0, 1), (1, 2), (2, 0))


def _edge_links(items, pairs: np.ndarray, tol: float) -> np.ndarray:
    verts = np.array([item.triangle.vertices for item in items])
    normals = np.array([item.triangle.inward_normals for item in items])
    # on_plane[p, e, v]: vertex v of the second cell lies on the great circle of edge e of the first
    on_plane = np.abs(np.einsum("pek,pvk->pev", normals[pairs[:, 0]], verts[pairs[:, 1]])) <= tol
    linked = np.zeros(len(pairs), dtype=bool)
    for e, (a, b) in enumerate(_EDGE_PAIRS):
        for c, d in _EDGE_PAIRS:
            for p in np.flatnonzero(on_plane[:, e, c] & on_plane[:, e, d] & ~linked):
                vi, vj = verts[pairs[p, 0]], verts[pairs[p, 1]]
                linked[p] = _arc_overlap(vi[a], vi[b], vj[c], vj[d], tol)
    return linked


def _within(ti: SphericalTriangle, tj: SphericalTriangle, gap: float) -> bool:
    # for disjoint convex cells the closest pair involves a vertex of one of them
    limit = gap + TAU_MEM
    return (distances_to_triangle(ti.vertices, tj).min() <= limit
            or distances_to_triangle(tj.vertices, ti).min() <= limit)


def components(approx: ApproximationSet, adjacency: str = "edge", gap: float = 0.0,
               tol: float = 1e-9) -> list[list[int]]:
    """Split the accepted cells into connected groups.

    ``adjacency="edge"`` links cells sharing a piece of boundary of positive
    length.  ``adjacency="gap"`` links cells whose closed triangles lie within
    ``gap`` radians of each other (``gap=0``: cells that touch, even at a single
    vertex).  Returns sorted index lists ordered by their smallest index.
    """
    from scipy.cluster.hierarchy import DisjointSet
    from scipy.spatial import cKDTree

    if adjacency not in ("edge", "gap"):
        raise ValueError(f"unknown adjacency {adjacency!r}")
    items = approx.items
    if not items:
        return []
    slack = (gap if adjacency == "gap" else 0.0) + 1e-9
    centres = approx.centroids
    sizes = np.array([item.s for item in items])
    pairs = cKDTree(centres).query_pairs(2 * sizes.max() + slack, output_type="ndarray")
    groups = DisjointSet(range(len(items)))
    if len(pairs):
        # any point of a cell is within its diameter of the centroid
        apart = np.arccos(np.clip(np.einsum("ij,ij->i", centres[pairs[:, 0]], centres[pairs[:, 1]]), -1, 1))
        keep = apart <= sizes[pairs[:, 0]] + sizes[pairs[:, 1]] + slack
        pairs, apart = pairs[keep], apart[keep]
        if adjacency == "edge":
            for i, j in pairs[_edge_links(items, pairs, tol)].tolist():
                groups.merge(i, j)
        else:
            # nearest pairs first so that most later pairs are already joined
            for i, j in pairs[np.argsort(apart, kind="stable")].tolist():
                if not groups.connected(i, j) and _within(items[i].triangle, items[j].triangle, gap):
                    groups.merge(i, j)
    return sorted((sorted(g) for g in groups.subsets()), key=lambda g: g[0])
