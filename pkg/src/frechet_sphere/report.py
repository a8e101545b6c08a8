"""Run reports: a lossless delimited-text format and a GeoJSON export."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import vectors_to_lonlat
from .frechet import DataSet
from .solver import ApproximationSet, SolverConfig, measure

MAGIC = "# frechet-sphere report v1"
COLUMNS = (
    "d1x", "d1y", "d1z", "d2x", "d2y", "d2z", "d3x", "d3y", "d3z",
    "cx", "cy", "cz", "s", "v", "u",
)
_INT_KEYS = {"n", "max_iterations", "iterations", "branch_count", "discard_count"}
_BOOL_KEYS = {"truncated"}
_STR_KEYS = {"label"}


@dataclass
class RunReport:
    """Everything a solve run produces apart from timing.

    ``header`` holds the configuration echo, data set description and run
    statistics; ``rows`` holds one 15-column row per accepted triangle.
    """

    header: dict = field(default_factory=dict)
    rows: np.ndarray = field(default_factory=lambda: np.empty((0, len(COLUMNS))))

    @classmethod
    def from_run(cls, data: DataSet, config: SolverConfig, approx: ApproximationSet) -> RunReport:
        stats = approx.stats
        header = {
            "label": data.label,
            "n": len(data),
            "p": float(config.params.p),
            "eps": float(config.eps),
            "delta": float(config.delta),
            "max_iterations": config.max_iterations,
            "tau_mem": float(config.tau_mem),
            "tau_num": float(config.tau_num),
            "iterations": stats.iterations,
            "branch_count": stats.branch_count,
            "discard_count": stats.discard_count,
            "best_value": float(stats.best_value),
            "truncated": stats.truncated,
            "nu": float(measure(approx)),
        }
        rows = [
            np.concatenate((item.triangle.vertices.ravel(), item.centroid, [item.s, item.v, item.u]))
            for item in approx.items
        ]
        table = np.array(rows) if rows else np.empty((0, len(COLUMNS)))
        return cls(header, table)

    def __eq__(self, other):
        if not isinstance(other, RunReport):
            return NotImplemented
        return self.header == other.header and np.array_equal(self.rows, other.rows)

    @property
    def vertices(self) -> np.ndarray:
        return self.rows[:, :9].reshape(-1, 3, 3)

    @property
    def centroids(self) -> np.ndarray:
        return self.rows[:, 9:12]


def _format_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_value(key: str, text: str):
    if key in _STR_KEYS:
        return text
    if key in _BOOL_KEYS:
        if text not in ("True", "False"):
            raise ValueError(f"bad boolean for {key}: {text!r}")
        return text == "True"
    if key in _INT_KEYS:
        return int(text)
    return float(text)


def dumps_text(report: RunReport) -> str:
    lines = [MAGIC]
    lines += [f"# {key}={_format_value(value)}" for key, value in report.header.items()]
    lines.append(",".join(COLUMNS))
    lines += [",".join(repr(float(v)) for v in row) for row in report.rows]
    return "\n".join(lines) + "\n"


def loads_text(text: str) -> RunReport:
    lines = text.splitlines()
    if not lines or lines[0] != MAGIC:
        raise ValueError("not a frechet-sphere report")
    header = {}
    body = []
    for line in lines[1:]:
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            header[key] = _parse_value(key, value)
        elif line == ",".join(COLUMNS) or not line:
            continue
        else:
            body.append([float(tok) for tok in line.split(",")])
    rows = np.array(body) if body else np.empty((0, len(COLUMNS)))
    if rows.shape[1] != len(COLUMNS):
        raise ValueError(f"expected {len(COLUMNS)} columns, got {rows.shape[1]}")
    return RunReport(header, rows)


def to_geojson(report: RunReport) -> dict:
    """FeatureCollection with one Polygon per accepted triangle and one Point
    per centroid.  Positions are ``[longitude, latitude]`` in degrees; rings
    run counter-clockwise seen from outside the sphere."""
    features = []
    for index, (tri, row) in enumerate(zip(report.vertices, report.rows)):
        if np.linalg.det(tri) < 0:
            tri = tri[[0, 2, 1]]
        ring = vectors_to_lonlat(tri).tolist()
        ring.append(ring[0])
        s, v, u = (float(x) for x in row[12:])
        props = {"index": index, "s": s, "v": v, "u": u}
        features.append({
            "type": "Feature",
            "geometry": {"type": "Polygon", "coordinates": [ring]},
            "properties": {"kind": "triangle", **props},
        })
        lon, lat = vectors_to_lonlat(row[9:12]).tolist()
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [lon, lat]},
            "properties": {"kind": "centroid", **props},
        })
    return {"type": "FeatureCollection", "metadata": dict(report.header), "features": features}


def write_report(report: RunReport, path, fmt: str = "text") -> None:
    path = Path(path)
    if fmt == "text":
        path.write_text(dumps_text(report))
    elif fmt == "geojson":
        path.write_text(json.dumps(to_geojson(report), indent=1) + "\n")
    else:
        raise ValueError(f"unknown report format {fmt!r}")


def read_report(path) -> RunReport:
    return loads_text(Path(path).read_text())


def write_metadata(path, **fields) -> None:
    """Sidecar for run-dependent values (timings) kept out of the report."""
    Path(path).write_text(json.dumps(fields, indent=1, sort_keys=True) + "\n")


