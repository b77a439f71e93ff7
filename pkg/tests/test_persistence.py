import math

import numpy as np
import pytest

from tdalab.complexes import FilteredCubicalGrid, rips_complex, weighted_rips_complex
from tdalab.geometry import PointCloud, euclidean_distance_matrix
from tdalab.persistence import (
    PersistenceDiagram,
    _cells_of,
    _ph_from_cells,
    compute_ph,
    compute_ph0_unionfind,
    naive_reduction_oracle,
)

RNG = np.random.default_rng(99)


def _dm(points):
    return euclidean_distance_matrix(PointCloud(points))


def _random_weighted_complex(rng, max_points=12):
    n = int(rng.integers(3, max_points + 1))
    pts = rng.random((n, 2))
    f = rng.random(n)
    return weighted_rips_complex(_dm(pts), f)


def _random_grid(rng, max_side=8):
    side = int(rng.integers(2, max_side + 1))
    vals = rng.random((side, side))
    vals[rng.random((side, side)) < 0.35] = np.inf
    if not np.isfinite(vals).any():
        vals[0, 0] = 0.5
    return FilteredCubicalGrid(vals)


# ---------------------------------------------------------------------------
# basic diagrams
# ---------------------------------------------------------------------------


def test_single_vertex():
    pd = compute_ph(rips_complex(_dm([[0.0, 0.0]])))
    assert pd.multiset() == ((0.0, 0.0, math.inf),)


def test_two_points_one_merge():
    pd = compute_ph(rips_complex(_dm([[0, 0], [2, 0]])))
    assert pd.multiset() == ((0.0, 0.0, 2.0), (0.0, 0.0, math.inf))


def test_unit_square_dim1():
    pd = compute_ph(rips_complex(_dm([[0, 0], [1, 0], [1, 1], [0, 1]])))
    d1 = pd.in_dim(1)
    assert d1.shape == (1, 2)
    assert d1[0, 0] == pytest.approx(1.0)
    assert d1[0, 1] == pytest.approx(math.sqrt(2))
    # cross-check against the naive oracle
    oracle = naive_reduction_oracle(rips_complex(_dm([[0, 0], [1, 0], [1, 1], [0, 1]])))
    assert pd.multiset() == oracle.multiset()


def test_chain_of_three_union_find():
    pd = compute_ph0_unionfind(rips_complex(_dm([[0, 0], [1, 0], [3, 0]]), max_dim=1))
    assert pd.multiset() == ((0.0, 0.0, 1.0), (0.0, 0.0, 2.0), (0.0, 0.0, math.inf))


def test_isolated_vertices_oracle():
    cx = rips_complex(_dm(RNG.random((5, 2))), r_max=1e-9)
    pd = naive_reduction_oracle(cx)
    assert len(pd.in_dim(0)) == 5
    assert np.all(np.isinf(pd.in_dim(0)[:, 1]))


def test_diagram_requires_death_after_birth():
    with pytest.raises(ValueError):
        PersistenceDiagram(np.array([[0.0, 2.0, 1.0]]))


def test_connected_complex_one_essential_component():
    for _ in range(5):
        cx = rips_complex(_dm(RNG.random((8, 2))))
        pd = compute_ph(cx)
        d0 = pd.in_dim(0)
        assert np.sum(np.isinf(d0[:, 1])) == 1


# ---------------------------------------------------------------------------
# oracle equality (the dual-route check)
# ---------------------------------------------------------------------------


def test_oracle_equality_weighted_rips():
    rng = np.random.default_rng(1234)
    for _ in range(25):
        cx = _random_weighted_complex(rng)
        fast = compute_ph(cx, 1)
        slow = naive_reduction_oracle(cx, 1)
        uf = compute_ph0_unionfind(cx)
        assert fast.multiset() == slow.multiset()
        d0 = tuple(row for row in fast.multiset() if row[0] == 0)
        assert d0 == uf.multiset()


def test_oracle_equality_cubical():
    rng = np.random.default_rng(4321)
    for _ in range(15):
        grid = _random_grid(rng)
        fast = compute_ph(grid, 1)
        slow = naive_reduction_oracle(grid, 1)
        uf = compute_ph0_unionfind(grid)
        assert fast.multiset() == slow.multiset()
        d0 = tuple(row for row in fast.multiset() if row[0] == 0)
        assert d0 == uf.multiset()


def test_oracle_size_guard():
    cx = rips_complex(_dm(RNG.random((25, 2))))  # 25 + 300 + 2300 simplices
    with pytest.raises(ValueError):
        naive_reduction_oracle(cx)


# ---------------------------------------------------------------------------
# structural properties
# ---------------------------------------------------------------------------


def test_tie_permutation_invariance():
    # permuting equal-value cells in the reduction order must not change the
    # interval multiset; grid points produce plenty of exact ties
    pts = np.stack(np.meshgrid(np.arange(3.0), np.arange(3.0)), -1).reshape(-1, 2)
    cx = rips_complex(_dm(pts))
    values, boundaries = _cells_of(cx)
    base = _ph_from_cells(values, boundaries, 1, True).multiset()
    rng = np.random.default_rng(0)
    for _ in range(6):
        perm_values = [v.copy() for v in values]
        perm_boundaries = [None if b is None else b.copy() for b in boundaries]
        for d in (1, 2):
            v = perm_values[d]
            order = np.arange(len(v))
            # shuffle within blocks of equal value
            for val in np.unique(v):
                block = np.nonzero(v == val)[0]
                order[block] = rng.permutation(block)
            perm_values[d] = v[order]
            perm_boundaries[d] = perm_boundaries[d][order]
            if d == 1:
                # renumber edge rows inside triangle boundaries
                inverse = np.empty(len(order), dtype=np.int64)
                inverse[order] = np.arange(len(order))
                if perm_boundaries[2] is not None:
                    perm_boundaries[2] = inverse[boundaries[2]]
        got = _ph_from_cells(perm_values, perm_boundaries, 1, True).multiset()
        assert got == base


def test_euler_consistency_full_filtration():
    # chi = V - E + T must equal b0 - b1 + b2 at the end of a full
    # filtration, with b2 = #triangles - #degree-1 deaths (nothing kills a
    # 2-cycle in a complex capped at dimension 2)
    for seed in range(5):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 10))
        cx = rips_complex(_dm(rng.random((n, 2))))
        pd = compute_ph(cx, 1, drop_zero=False)
        d0, d1 = pd.in_dim(0), pd.in_dim(1)
        b0 = int(np.sum(np.isinf(d0[:, 1])))
        b1 = int(np.sum(np.isinf(d1[:, 1])))
        deaths1 = int(np.sum(np.isfinite(d1[:, 1])))
        b2 = len(cx.triangles) - deaths1
        chi = cx.n_vertices - len(cx.edges) + len(cx.triangles)
        assert b0 - b1 + b2 == chi


def test_euler_consistency_at_intermediate_scales():
    rng = np.random.default_rng(77)
    n = 8
    pts = rng.random((n, 2))
    full = rips_complex(_dm(pts))
    pd = compute_ph(full, 1, drop_zero=False)
    tri_deaths = pd.in_dim(1)
    for r in np.quantile(full.edge_values, [0.3, 0.6, 0.9]):
        v = n
        e = int(np.sum(full.edge_values <= r))
        t = int(np.sum(full.triangle_values <= r))
        d0, d1 = pd.in_dim(0), pd.in_dim(1)
        alive0 = int(np.sum((d0[:, 0] <= r) & (d0[:, 1] > r)))
        alive1 = int(np.sum((d1[:, 0] <= r) & (d1[:, 1] > r)))
        killed1 = int(np.sum(np.isfinite(d1[:, 1]) & (d1[:, 1] <= r)))
        b2 = t - killed1
        assert alive0 - alive1 + b2 == v - e + t


def test_zero_persistence_dropped_by_default():
    pts = np.stack(np.meshgrid(np.arange(3.0), np.arange(3.0)), -1).reshape(-1, 2)
    cx = rips_complex(_dm(pts))
    pd = compute_ph(cx, 1)
    assert np.all(pd.intervals[:, 2] != pd.intervals[:, 1])
    raw = compute_ph(cx, 1, drop_zero=False)
    assert len(raw) >= len(pd)


def test_unionfind_matches_reduction_on_mask_components():
    cells = np.zeros((6, 6))
    cells[:] = np.inf
    cells[0:2, 0:2] = 1.0
    cells[4:6, 4:6] = 2.0  # second component, never merged
    grid = FilteredCubicalGrid(cells)
    pd = compute_ph0_unionfind(grid)
    d0 = pd.in_dim(0)
    assert len(d0) == 2
    assert np.all(np.isinf(d0[:, 1]))


def test_lifespans_sorted_descending():
    cx = rips_complex(_dm(RNG.random((10, 2))))
    spans = compute_ph(cx).lifespans(0)
    assert np.all(np.diff(spans) <= 0)
