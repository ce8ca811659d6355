import numpy as np
import pytest

from hybridsn_cli.data.cube import GroundTruthMap, HyperspectralCube
from hybridsn_cli.errors import NumericalError, ShapeError
from hybridsn_cli.model import build_model, predict_scene


def _scene(rng, height=9, width=7):
    cube = HyperspectralCube(rng.normal(size=(height, width, 8)))
    labels = np.zeros((height, width), dtype=np.int64)
    labels[2:5, 1:6] = 1
    labels[6:8, 3] = 2
    return cube, GroundTruthMap(labels, 2)


def test_grid_matches_scene(tiny, rng):
    cube, gt = _scene(rng)
    grid = predict_scene(build_model(tiny), cube, gt)
    assert grid.shape == gt.labels.shape
    assert np.all((grid > 0) == (gt.labels > 0))
    assert set(np.unique(grid[gt.labels > 0])) <= {1, 2}


def test_identical_patches_get_one_class(tiny):
    cube = HyperspectralCube(np.ones((9, 9, 8)))
    labels = np.zeros((9, 9), dtype=np.int64)
    labels[2:7, 2:7] = 1
    grid = predict_scene(build_model(tiny), cube, GroundTruthMap(labels, 2))
    assert len(np.unique(grid[2:7, 2:7])) == 1


def test_all_pixels(tiny, rng):
    cube, gt = _scene(rng)
    grid = predict_scene(build_model(tiny), cube, gt, all_pixels=True)
    assert np.all(grid > 0)


def test_threads_do_not_change_the_result(tiny, rng):
    cube, gt = _scene(rng)
    model = build_model(tiny)
    serial = predict_scene(model, cube, gt, all_pixels=True, batch_size=5, threads=1)
    parallel = predict_scene(model, cube, gt, all_pixels=True, batch_size=5, threads=4)
    np.testing.assert_array_equal(serial, parallel)


def test_nan_parameters(tiny, rng):
    cube, gt = _scene(rng)
    model = build_model(tiny)
    model.parameters()["logits.bias"][0] = np.nan
    with pytest.raises(NumericalError, match="logits.bias"):
        predict_scene(model, cube, gt)


def test_component_count_mismatch(tiny, rng):
    with pytest.raises(ShapeError):
        predict_scene(build_model(tiny), HyperspectralCube(rng.normal(size=(5, 5, 6))), all_pixels=True)
