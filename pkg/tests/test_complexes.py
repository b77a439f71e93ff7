import math

import numpy as np
import pytest

from tdalab.complexes import (
    FilteredComplex,
    FilteredCubicalGrid,
    absolute_height_filtration,
    complex_to_csv,
    cubical_complex,
    height_filtration,
    rips_complex,
    tubular_filtration,
    weighted_rips_complex,
)
from tdalab.geometry import BinaryMask, Line, PointCloud, euclidean_distance_matrix

RNG = np.random.default_rng(11)


def _dm(points):
    return euclidean_distance_matrix(PointCloud(points))


# ---------------------------------------------------------------------------
# Vietoris-Rips
# ---------------------------------------------------------------------------


def test_rips_two_points():
    cx = rips_complex(_dm([[0, 0], [0, 3]]))
    assert np.allclose(cx.vertex_values, [0, 0])
    assert cx.edges.tolist() == [[0, 1]]
    assert cx.edge_values[0] == pytest.approx(3.0)
    assert len(cx.triangles) == 0


def test_rips_unit_square_triangle_values():
    cx = rips_complex(_dm([[0, 0], [1, 0], [1, 1], [0, 1]]))
    # every triangle contains a diagonal, so all 4 triangle values are sqrt(2)
    assert len(cx.triangles) == 4
    assert np.allclose(cx.triangle_values, math.sqrt(2))
    # edge values: 4 sides at 1, 2 diagonals at sqrt(2)
    assert sorted(np.round(cx.edge_values, 12).tolist()) == pytest.approx(
        [1, 1, 1, 1, math.sqrt(2), math.sqrt(2)]
    )


def test_rips_full_simplex_counts():
    n = 10
    cx = rips_complex(_dm(RNG.random((n, 2))))
    assert len(cx.edges) == math.comb(n, 2)
    assert len(cx.triangles) == math.comb(n, 3)
    cx.validate()


def test_rips_r_max_truncates():
    pts = [[0, 0], [1, 0], [0.5, 5.0]]
    cx = rips_complex(_dm(pts), r_max=2.0)
    assert len(cx.edges) == 1
    assert len(cx.triangles) == 0


def test_rips_monotonicity_random():
    cx = rips_complex(_dm(RNG.random((12, 3))))
    cx.validate()
    lookup = {tuple(e): v for e, v in zip(map(tuple, cx.edges), cx.edge_values)}
    for t, v in zip(cx.triangles, cx.triangle_values):
        a, b, c = map(int, t)
        assert v == max(lookup[(a, b)], lookup[(a, c)], lookup[(b, c)])


def test_rips_guard_and_force():
    pts = RNG.random((401, 2))
    dm = _dm(pts)
    with pytest.raises(ValueError):
        rips_complex(dm, max_dim=2)
    # edges-only and forced builds are allowed
    rips_complex(dm, max_dim=1)


def test_rips_ordering_sorted():
    cx = rips_complex(_dm(RNG.random((8, 2))))
    assert np.all(np.diff(cx.edge_values) >= 0)
    assert np.all(np.diff(cx.triangle_values) >= 0)


# ---------------------------------------------------------------------------
# weighted Rips
# ---------------------------------------------------------------------------


def test_weighted_rips_zero_weights_halves_distances():
    pts = RNG.random((6, 2))
    dm = _dm(pts)
    cx = weighted_rips_complex(dm, np.zeros(6))
    plain = rips_complex(dm)
    assert np.allclose(np.sort(cx.edge_values), np.sort(plain.edge_values / 2.0))


def test_weighted_rips_swallowed_vertex():
    # d(u, v) = 3 <= |0 - 5|: the edge appears when the later vertex does
    dm = _dm([[0, 0], [3, 0]])
    cx = weighted_rips_complex(dm, [0.0, 5.0])
    assert cx.edge_values[0] == pytest.approx(5.0)


def test_weighted_rips_meeting_balls():
    dm = _dm([[0, 0], [4, 0]])
    cx = weighted_rips_complex(dm, [1.0, 2.0])
    assert cx.edge_values[0] == pytest.approx((1.0 + 2.0 + 4.0) / 2.0)


def test_weighted_rips_edges_dominate_vertices():
    f = RNG.random(10)
    cx = weighted_rips_complex(_dm(RNG.random((10, 2))), f)
    below = np.maximum(f[cx.edges[:, 0]], f[cx.edges[:, 1]])
    assert np.all(cx.edge_values >= below - 1e-15)
    cx.validate()


def test_weighted_rips_constant_weights_shift():
    pts = RNG.random((7, 2))
    dm = _dm(pts)
    c = 0.8
    cx = weighted_rips_complex(dm, np.full(7, c))
    # |f(u)-f(v)| = 0, so every edge value is (2c + d)/2 = c + d/2
    plain = rips_complex(dm)
    assert np.allclose(np.sort(cx.edge_values), np.sort(plain.edge_values / 2.0 + c))


def test_weighted_rips_length_mismatch():
    with pytest.raises(ValueError):
        weighted_rips_complex(_dm(RNG.random((5, 2))), np.zeros(4))


# ---------------------------------------------------------------------------
# cubical grids
# ---------------------------------------------------------------------------


def _mask(cells, width=None):
    cells = np.asarray(cells, dtype=bool)
    return BinaryMask(cells, (0.0, 0.0), float(width or cells.shape[0]))


def test_cubical_tubular_orders_rows():
    mask = _mask(np.ones((2, 2)))
    grid = cubical_complex(mask, tubular_filtration(Line.horizontal(0.0)))
    # bottom row (iy = 0) closer to the line than the top row
    assert np.all(grid.top_values[:, 0] < grid.top_values[:, 1])


def test_cubical_single_cell_t_construction():
    cells = np.zeros((3, 3), dtype=bool)
    cells[1, 1] = True
    grid = cubical_complex(_mask(cells), tubular_filtration(Line.horizontal(0.0)))
    v = grid.top_values[1, 1]
    assert np.isfinite(v)
    assert np.isinf(grid.top_values[0, 0])
    # the four corner vertices and four edges inherit exactly v
    vv = grid.vertex_values()
    assert np.count_nonzero(np.isfinite(vv)) == 4
    assert np.allclose(vv[np.isfinite(vv)], v)
    ex = grid.edge_values_x()
    ey = grid.edge_values_y()
    finite_edges = np.concatenate([ex[np.isfinite(ex)], ey[np.isfinite(ey)]])
    assert len(finite_edges) == 4
    assert np.allclose(finite_edges, v)


def test_cubical_lower_cells_are_min_of_tops():
    vals = RNG.random((5, 5))
    vals[RNG.random((5, 5)) < 0.3] = np.inf
    if not np.isfinite(vals).any():
        vals[0, 0] = 0.5
    grid = FilteredCubicalGrid(vals)
    vv = grid.vertex_values()
    for i in range(6):
        for j in range(6):
            incident = [
                vals[a, b]
                for a, b in ((i - 1, j - 1), (i, j - 1), (i - 1, j), (i, j))
                if 0 <= a < 5 and 0 <= b < 5
            ]
            assert vv[i, j] == min(incident) if incident else np.isinf(vv[i, j])


def test_cubical_diagonal_cells_share_vertex():
    cells = np.zeros((2, 2), dtype=bool)
    cells[0, 0] = cells[1, 1] = True
    grid = cubical_complex(_mask(cells), height_filtration((1.0, 0.0)))
    vv = grid.vertex_values()
    # the shared center vertex carries the min of the two diagonal cells
    assert vv[1, 1] == min(grid.top_values[0, 0], grid.top_values[1, 1])


def test_height_and_absolute_height_filtrations():
    mask = _mask(np.ones((2, 2)))
    up = cubical_complex(mask, height_filtration((0.0, 1.0)))
    assert np.all(up.top_values[:, 0] < up.top_values[:, 1])
    absf = cubical_complex(mask, absolute_height_filtration((0.0, 1.0)))
    assert np.all(absf.top_values >= 0)


def test_cubical_rejects_unit_direction_violation():
    with pytest.raises(ValueError):
        height_filtration((1.0, 1.0))


def test_complex_csv_dump():
    cx = rips_complex(_dm([[0, 0], [0, 2]]))
    text = complex_to_csv(cx)
    lines = text.strip().splitlines()
    assert lines[0] == "0,0.0,0"
    assert lines[1] == "0,0.0,1"
    assert lines[2] == "1,2.0,0,1"


def test_filtered_complex_validate_catches_bad_edge():
    with pytest.raises(ValueError):
        FilteredComplex(
            np.array([0.0, 1.0]),
            np.array([[0, 1]]),
            np.array([0.5]),  # below the endpoint value 1.0
            np.empty((0, 3)),
            np.empty(0),
        ).validate()
