import numpy as np

from hybridsn_cli.data.cube import HyperspectralCube


def standardize_bands(cube: HyperspectralCube) -> HyperspectralCube:
    """Scale every band to mean 0 and population std 1.

    Fit on the whole scene. Zero-variance bands are only mean-centered.
    """
    pixels = cube.pixels()
    mean = pixels.mean(axis=0)
    std = pixels.std(axis=0)
    std = np.where(std > 0.0, std, 1.0)
    return HyperspectralCube(((pixels - mean) / std).reshape(cube.data.shape))
