"""Simulated samples and delimited-text point files."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np
from scipy.spatial.transform import Rotation

from .frechet import DataSet

RNG_NAME = "PCG64"

TETRAHEDRON = np.array([
    [1.0, 1.0, 1.0],
    [1.0, -1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
]) / np.sqrt(3.0)

POINT_FORMATS = ("vectors", "lonlat-degrees")
_SPLIT = re.compile(r"[,\s;]+")


class DataFormatError(ValueError):
    """A point file could not be parsed; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def make_rng(seed: int | None = None) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _meta(family: str, seed=None, **extra) -> dict:
    return {"family": family, "rng": RNG_NAME, "seed": seed, **extra}


def _normal_directions(n: int, rng: np.random.Generator) -> np.ndarray:
    out = rng.standard_normal((n, 3))
    norms = np.linalg.norm(out, axis=1)
    # redraw the (probability zero) vectors too short to normalise
    for k in np.flatnonzero(norms < 1e-12):
        while norms[k] < 1e-12:
            out[k] = rng.standard_normal(3)
            norms[k] = np.linalg.norm(out[k])
    return out / norms[:, None]


def sample_uniform_sphere(n: int, rng: np.random.Generator, seed=None) -> DataSet:
    if n < 1:
        raise ValueError("n must be at least 1")
    return DataSet(_normal_directions(n, rng), f"sphere-n{n}", _meta("sphere", seed, q=1))


def sample_uniform_half_sphere(n: int, rng: np.random.Generator, seed=None) -> DataSet:
    """Uniform sample of the closed upper hemisphere ``z >= 0``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    pts = _normal_directions(n, rng)
    pts[:, 2] = np.abs(pts[:, 2])
    return DataSet(pts, f"halfsphere-n{n}", _meta("halfsphere", seed, q=1))


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed rotation matrix (from a uniform unit quaternion)."""
    return Rotation.random(random_state=rng).as_matrix()


def sample_tetrahedron(rng: np.random.Generator, seed=None) -> DataSet:
    pts = TETRAHEDRON @ random_rotation(rng).T
    return DataSet(pts, "tetrahedron", _meta("tetrahedron", seed, q=4))


def sample_antipodal(rng: np.random.Generator, seed=None) -> DataSet:
    x = _normal_directions(1, rng)[0]
    return DataSet(np.array([x, -x]), "antipodal", _meta("antipodal", seed, q="inf"))


FAMILIES = {
    "sphere": sample_uniform_sphere,
    "halfsphere": sample_uniform_half_sphere,
    "tetrahedron": lambda n, rng, seed=None: sample_tetrahedron(rng, seed),
    "antipodal": lambda n, rng, seed=None: sample_antipodal(rng, seed),
}
FIXED_SIZE = {"tetrahedron": 4, "antipodal": 2}


def simulate(family: str, n: int | None, seed: int) -> DataSet:
    """Draw one sample of ``family`` from a generator seeded with ``seed``."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    fixed = FIXED_SIZE.get(family)
    if fixed is not None:
        if n is not None and n != fixed:
            raise ValueError(f"family {family!r} always has n = {fixed}, got n = {n}")
        n = fixed
    if n is None:
        raise ValueError(f"family {family!r} needs n")
    return FAMILIES[family](n, make_rng(seed), seed)


def lonlat_to_vectors(lon_deg, lat_deg) -> np.ndarray:
    lon = np.radians(np.asarray(lon_deg, dtype=float))
    lat = np.radians(np.asarray(lat_deg, dtype=float))
    return np.stack([np.cos(lat) * np.cos(lon), np.cos(lat) * np.sin(lon), np.sin(lat)], axis=-1)


def vectors_to_lonlat(points) -> np.ndarray:
    """Inverse of :func:`lonlat_to_vectors`; returns ``(..., 2)`` degrees."""
    points = np.asarray(points, dtype=float)
    lon = np.degrees(np.arctan2(points[..., 1], points[..., 0]))
    lat = np.degrees(np.arcsin(np.clip(points[..., 2], -1.0, 1.0)))
    return np.stack([lon, lat], axis=-1)


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def load_points(path, fmt: str = "vectors") -> DataSet:
    """Read a comma/whitespace delimited point file.

    ``vectors`` rows hold three Cartesian coordinates, ``lonlat-degrees`` rows hold
    longitude and latitude in degrees.  Blank lines and ``#`` comments are
    skipped; a single non-numeric header row before the data is allowed.
    """
    fmt = {"lonlat": "lonlat-degrees"}.get(fmt, fmt)
    if fmt not in POINT_FORMATS:
        raise ValueError(f"unknown point format {fmt!r}; choose from {POINT_FORMATS}")
    path = Path(path)
    width = 3 if fmt == "vectors" else 2
    rows = []
    header_seen = False
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = [tok for tok in _SPLIT.split(line) if tok]
            if not _is_number(tokens[0]):
                if header_seen or rows:
                    raise DataFormatError(f"non-numeric value {tokens[0]!r}", lineno)
                header_seen = True
                continue
            if len(tokens) != width:
                raise DataFormatError(f"expected {width} columns, found {len(tokens)}", lineno)
            try:
                values = [float(tok) for tok in tokens]
            except ValueError as exc:
                raise DataFormatError(str(exc), lineno) from None
            if fmt == "vectors":
                norm = float(np.linalg.norm(values))
                if not 0.9 <= norm <= 1.1:
                    raise DataFormatError(f"vector norm {norm:.4g} outside [0.9, 1.1]", lineno)
                rows.append(values)
            else:
                rows.append(lonlat_to_vectors(values[0], values[1]))
    if not rows:
        raise DataFormatError(f"no data rows in {path}")
    return DataSet(np.array(rows), path.stem)


def write_points(path, data: DataSet) -> None:
    """Write ``data`` in the ``vectors`` format with a metadata comment header."""
    lines = [f"# {key}={value}" for key, value in data.metadata.items()]
    lines.append("x,y,z")
    lines += [",".join(repr(float(c)) for c in row) for row in data.points]
    Path(path).write_text("\n".join(lines) + "\n")
