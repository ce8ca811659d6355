import numpy as np
import pytest

from hybridsn_cli.data.cube import HyperspectralCube
from hybridsn_cli.errors import DataError
from hybridsn_cli.preprocess import extract_patch, pad_cube, patch_batch


@pytest.fixture
def cube():
    return HyperspectralCube(np.arange(6 * 7 * 3, dtype=np.float64).reshape(6, 7, 3) + 1.0)


def test_window_one_is_the_spectrum(cube):
    patch = extract_patch(cube, 2, 3, 1)
    assert patch.data.shape == (1, 1, 3)
    np.testing.assert_array_equal(patch.data[0, 0], cube.data[2, 3])


def test_corner_patch_is_zero_outside_the_image(cube):
    patch = extract_patch(cube, 0, 0, 5, label=4)

    np.testing.assert_array_equal(patch.data[2:, 2:], cube.data[:3, :3])
    assert not patch.data[:2].any()
    assert not patch.data[:, :2].any()
    assert patch.label == 4
    assert (patch.window, patch.channels) == (5, 3)


def test_interior_patch_is_the_sub_cube(cube):
    np.testing.assert_array_equal(extract_patch(cube, 3, 4, 3).data, cube.data[2:5, 3:6])


def test_center_equals_cube_value(cube):
    for row in range(cube.height):
        for col in range(cube.width):
            np.testing.assert_array_equal(extract_patch(cube, row, col, 7).data[3, 3], cube.data[row, col])


@pytest.mark.parametrize("window", [0, 4, -3])
def test_window_must_be_odd(cube, window):
    with pytest.raises(DataError, match="odd"):
        extract_patch(cube, 0, 0, window)


@pytest.mark.parametrize("row, col", [(-1, 0), (6, 0), (0, 7)])
def test_center_outside_the_image(cube, row, col):
    with pytest.raises(DataError, match="outside"):
        extract_patch(cube, row, col, 3)


def test_batch_layout_matches_extract_patch(cube):
    rows, cols = np.array([0, 3, 5]), np.array([6, 2, 0])
    batch = patch_batch(pad_cube(cube, 5), rows, cols, 5)

    assert batch.shape == (3, 1, 3, 5, 5)
    for index, (row, col) in enumerate(zip(rows, cols)):
        expected = extract_patch(cube, row, col, 5).data.transpose(2, 0, 1)
        np.testing.assert_array_equal(batch[index, 0], expected)


def test_pad_cube_margin(cube):
    padded = pad_cube(cube, 9)
    assert padded.shape == (14, 15, 3)
    np.testing.assert_array_equal(padded[4:-4, 4:-4], cube.data)
