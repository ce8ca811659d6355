import zlib

import numpy as np

from hybridsn_cli.nn.layers import Layer


def _generator(seed: int, name: str) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, zlib.crc32(name.encode("utf-8"))])))


def init_parameters(layer: Layer, seed: int) -> Layer:
    """He-uniform weights in +-sqrt(6 / fan_in), zero biases.

    Every tensor draws from its own stream keyed by ``(seed, tensor name)``, so
    adding or removing a layer leaves the initialization of the others unchanged.
    """
    for leaf in layer.leaves():
        for key, value in leaf.params.items():
            fan_in = leaf.fan_in.get(key)
            if fan_in is None:
                value[...] = 0.0
                continue
            bound = np.sqrt(6.0 / fan_in)
            value[...] = _generator(seed, f"{leaf.name}.{key}").uniform(-bound, bound, size=value.shape)
    return layer
