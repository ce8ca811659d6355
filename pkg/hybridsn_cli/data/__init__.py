from hybridsn_cli.data.cube import GroundTruthMap, HyperspectralCube, discard_bands
from hybridsn_cli.data.envi import load_envi_cube, read_envi_header
from hybridsn_cli.data.manifest import DatasetManifest, load_manifest
from hybridsn_cli.data.raw import load_cube, load_ground_truth, load_raw_cube, save_ground_truth
from hybridsn_cli.data.render import render_class_map

__all__ = [
    "DatasetManifest",
    "GroundTruthMap",
    "HyperspectralCube",
    "discard_bands",
    "load_cube",
    "load_envi_cube",
    "load_ground_truth",
    "load_manifest",
    "load_raw_cube",
    "read_envi_header",
    "render_class_map",
    "save_ground_truth",
]
