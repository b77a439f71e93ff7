import json
import math

import numpy as np
import pytest

from tdalab import io
from tdalab.datagen import gen_curvature_dataset, gen_holes_dataset, gen_polygon_masks
from tdalab.geometry import BinaryMask, PointCloud, PolarCloud
from tdalab.learn import Standardizer, ridge_fit, threshold_fit
from tdalab.persistence import PersistenceDiagram
from tdalab.signatures import lifespans_topk

RNG = np.random.default_rng(8)


def test_cloud_csv_roundtrip(tmp_path):
    cloud = PointCloud(RNG.random((15, 3)))
    path = tmp_path / "cloud.csv"
    io.write_cloud_csv(path, cloud)
    back = io.read_cloud_csv(path)
    assert np.array_equal(back.points, cloud.points)
    assert path.read_text().splitlines()[0].count(",") == 2  # x,y,z with no header


def test_cloud_csv_rejects_malformed(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1.0,2.0\n3.0\n")
    with pytest.raises(ValueError, match="bad.csv:2"):
        io.read_cloud_csv(path)


def test_mask_pbm_roundtrip(tmp_path):
    cells = RNG.random((9, 9)) < 0.5
    cells[4, 4] = True
    mask = BinaryMask(cells, (0.25, -1.5), 3.0)
    path = tmp_path / "mask.pbm"
    io.write_mask_pbm(path, mask)
    back = io.read_mask_pbm(path)
    assert np.array_equal(back.cells, mask.cells)
    assert np.allclose(back.origin, mask.origin)
    assert back.width == mask.width
    assert path.read_text().startswith("P1\n")


def test_mask_pbm_without_extent_comment(tmp_path):
    path = tmp_path / "plain.pbm"
    path.write_text("P1\n2 2\n1 0\n0 1\n")
    mask = io.read_mask_pbm(path)
    # raster rows run top to bottom: first row is the top (iy = 1)
    assert mask.cells[0, 1] and mask.cells[1, 0]
    assert not mask.cells[0, 0] and not mask.cells[1, 1]
    assert mask.width == 2.0


def test_mask_csv_grid(tmp_path):
    path = tmp_path / "grid.csv"
    path.write_text("1,0\n0,1\n")
    mask = io.read_mask_csv(path)
    assert mask.cells[0, 1] and mask.cells[1, 0]
    assert io.read_mask(path).cells.tolist() == mask.cells.tolist()


def test_diagram_csv_roundtrip(tmp_path):
    pd = PersistenceDiagram(
        np.array([[0, 0, math.inf], [0, 0, 2.0], [1, 1.0, math.sqrt(2)]])
    )
    path = tmp_path / "diagram.csv"
    io.write_diagram_csv(path, pd)
    text = path.read_text()
    assert "0,0.0,inf" in text
    assert "0,0.0,2.0" in text
    back = io.read_diagram_csv(path)
    assert back.multiset() == pd.multiset()


def test_dataset_roundtrip_clouds(tmp_path):
    ds = gen_holes_dataset(clouds_per_shape=1, points_per_cloud=25, seed=1)
    io.write_dataset(ds, tmp_path / "holes")
    back = io.read_dataset(tmp_path / "holes")
    assert len(back) == len(ds)
    assert np.array_equal(back.labels, ds.labels)
    assert back.meta["generator"] == "holes"
    for a, b in zip(ds.items, back.items):
        assert np.array_equal(a.points, b.points)


def test_dataset_roundtrip_polar(tmp_path):
    train, _ = gen_curvature_dataset(seed=2, clouds_per_kappa=1, points_per_cloud=10, test_count=1)
    io.write_dataset(train, tmp_path / "curv")
    back = io.read_dataset(tmp_path / "curv")
    assert isinstance(back.items[0], PolarCloud)
    assert back.items[0].curvature == train.labels[0]
    assert np.array_equal(back.items[0].coords, train.items[0].coords)


def test_dataset_roundtrip_masks(tmp_path):
    ds = gen_polygon_masks(6, 12, seed=0)
    io.write_dataset(ds, tmp_path / "masks")
    back = io.read_dataset(tmp_path / "masks")
    for a, b in zip(ds.items, back.items):
        assert np.array_equal(a.cells, b.cells)


def test_dataset_rerun_is_byte_identical(tmp_path):
    ds = gen_holes_dataset(clouds_per_shape=1, points_per_cloud=10, seed=9)
    p1 = io.write_dataset(ds, tmp_path / "a")
    p2 = io.write_dataset(ds, tmp_path / "b")
    assert p1.read_text() == p2.read_text()
    files = sorted(f.name for f in (tmp_path / "a").iterdir())
    for name in files:
        assert (tmp_path / "a" / name).read_text() == (tmp_path / "b" / name).read_text()


def test_dataset_missing_manifest(tmp_path):
    with pytest.raises(FileNotFoundError):
        io.read_dataset(tmp_path)


def test_model_json():
    model = ridge_fit(RNG.random((10, 2)), RNG.random(10), lam=0.1)
    std = Standardizer.fit(RNG.random((10, 2)))
    payload = json.loads(io.model_to_json(model, std))
    assert payload["kind"] == "ridge"
    assert len(payload["weights"]) == 2
    assert len(payload["standardizer"]["mean"]) == 2
    t = threshold_fit([0.0, 1.0], [0.0, 1.0])
    assert json.loads(io.model_to_json(t))["kind"] == "threshold"


def test_signatures_csv_and_sidecar():
    pds = [
        PersistenceDiagram(np.array([[0, 0, 1.0]])),
        PersistenceDiagram(np.array([[0, 0, 2.0], [0, 0.5, 1.0]])),
    ]
    vecs = [lifespans_topk(pd, 0, 3) for pd in pds]
    csv_text, sidecar = io.signatures_to_csv(vecs)
    assert len(csv_text.strip().splitlines()) == 2
    assert json.loads(sidecar)["kind"] == "lifespans"
    mixed = [vecs[0], lifespans_topk(pds[1], 0, 4)]
    with pytest.raises(ValueError):
        io.signatures_to_csv(mixed)
