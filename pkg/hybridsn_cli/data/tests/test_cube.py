import numpy as np
import pytest

from hybridsn_cli.data.cube import GroundTruthMap, HyperspectralCube, discard_bands
from hybridsn_cli.errors import DataError


@pytest.fixture
def cube():
    return HyperspectralCube(np.arange(2 * 2 * 6, dtype=np.float64).reshape(2, 2, 6))


def test_discard_keeps_order(cube):
    result = discard_bands(cube, [4, 1])
    assert result.bands == 4
    np.testing.assert_array_equal(result.data[0, 0], [0, 2, 3, 5])


def test_discard_nothing_is_identity(cube):
    assert discard_bands(cube, []) is cube


def test_second_empty_discard_changes_nothing(cube):
    once = discard_bands(cube, [0, 5])
    np.testing.assert_array_equal(discard_bands(once, []).data, once.data)


@pytest.mark.parametrize("bands, discarded", [(224, 24), (224, 20)])
def test_discard_counts(bands, discarded):
    cube = HyperspectralCube(np.zeros((1, 1, bands)))
    assert discard_bands(cube, range(100, 100 + discarded)).bands == bands - discarded


@pytest.mark.parametrize(
    "indices, match",
    [([1, 1], "Duplicate"), ([6], "out of range"), ([-1], "out of range"), (list(range(6)), "every band")],
)
def test_invalid_discard_lists(cube, indices, match):
    with pytest.raises(DataError, match=match):
        discard_bands(cube, indices)


def test_cube_must_be_three_dimensional():
    with pytest.raises(DataError, match="3-dimensional"):
        HyperspectralCube(np.zeros((2, 2)))


def test_cube_extents_must_be_positive():
    with pytest.raises(DataError, match=">= 1"):
        HyperspectralCube(np.zeros((2, 0, 3)))


def test_pixels_are_row_major(cube):
    assert cube.pixels().shape == (4, 6)
    np.testing.assert_array_equal(cube.pixels()[1], cube.data[0, 1])


def test_ground_truth_checks(cube):
    gt = GroundTruthMap(np.array([[0, 1], [2, 2]]), num_classes=3)
    gt.check_matches(cube)
    np.testing.assert_array_equal(gt.class_totals(), [1, 2, 0])

    with pytest.raises(DataError, match="exceeds"):
        GroundTruthMap(np.array([[4]]), num_classes=3)
    with pytest.raises(DataError, match="non-negative"):
        GroundTruthMap(np.array([[-1]]), num_classes=3)
    with pytest.raises(DataError, match="3x1"):
        GroundTruthMap(np.zeros((3, 1), dtype=np.int64), num_classes=3).check_matches(cube)
