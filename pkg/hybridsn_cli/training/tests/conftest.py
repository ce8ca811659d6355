import numpy as np
import pytest

from hybridsn_cli.data.cube import GroundTruthMap, HyperspectralCube
from hybridsn_cli.preprocess.split import stratified_split


def synthetic_scene(num_classes=2, height=10, width=10, bands=8, seed=0):
    """Scene whose classes have distinct spectra, labels striped by column."""
    rng = np.random.default_rng(seed)
    labels = (np.arange(width)[None, :] * num_classes // width + 1).repeat(height, axis=0)
    prototypes = rng.normal(size=(num_classes, bands)) * 2.0
    cube = prototypes[labels - 1] + 0.1 * rng.normal(size=(height, width, bands))
    return HyperspectralCube(cube), GroundTruthMap(labels.astype(np.int64), num_classes)


@pytest.fixture
def scene():
    return synthetic_scene()


@pytest.fixture
def split(scene):
    return stratified_split(scene[1], 0.3, 0.2, seed=4)
