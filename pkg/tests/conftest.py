import numpy as np
import pytest

from frechet_sphere.geometry import GeometryError, SphericalTriangle

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


def random_unit(rng, size=None):
    v = rng.standard_normal((size or 1, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v if size else v[0]


def random_triangle(rng, max_radius=0.7):
    """Random triangle with vertices within ``max_radius`` of a random centre."""
    while True:
        centre = random_unit(rng)
        radius = rng.uniform(0.02, max_radius)
        tangent = np.linalg.svd(centre[None, :])[2][1:]
        angles = np.sort(rng.uniform(0, 2 * np.pi, 3))
        dirs = np.cos(angles)[:, None] * tangent[0] + np.sin(angles)[:, None] * tangent[1]
        radii = radius * rng.uniform(0.3, 1.0, 3)
        verts = np.cos(radii)[:, None] * centre + np.sin(radii)[:, None] * dirs
        try:
            return SphericalTriangle(verts)
        except GeometryError:
            continue


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def octant():
    return SphericalTriangle(np.array([E1, E2, E3]))


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE, key=str):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
