import os

import pytest
import yaml

from hybridsn_cli.data.manifest import builtin_manifests, load_manifest, load_sidecar, manifest_from_dict
from hybridsn_cli.data.tests.factories import manifest_data
from hybridsn_cli.errors import DataError


def test_builtin_manifests():
    assert builtin_manifests() == ["indian_pines", "pavia_university", "salinas"]


@pytest.mark.parametrize(
    "name, classes, discarded, pca_k",
    [("indian_pines", 16, 24, 30), ("pavia_university", 9, 0, 15), ("salinas", 16, 20, 30)],
)
def test_builtin_manifest_metadata(tmp_path, name, classes, discarded, pca_k):
    manifest = load_manifest(name, data_dir=str(tmp_path))

    assert manifest.num_classes == classes
    assert len(manifest.palette) == classes + 1
    assert len(manifest.bands_to_discard) == discarded
    assert manifest.default_pca_k == pca_k
    assert manifest.ground_truth_path.startswith(str(tmp_path))


def test_user_manifest_paths_resolve_against_its_directory(tmp_path):
    folder = tmp_path / "scenes"
    folder.mkdir()
    path = folder / "toy.yaml"
    path.write_text(yaml.safe_dump(manifest_data(defaults={"fractions": [0.1, 0.2]})))

    manifest = load_manifest(str(path))

    assert manifest.cube_path == os.path.join(str(folder), "toy.raw")
    assert manifest.ground_truth_path == os.path.join(str(folder), "toy_gt.u16")
    assert manifest.default_fractions == (0.1, 0.2)
    assert manifest.palette[1] == (0, 0, 255)
    assert manifest.source == str(path)


def test_absolute_paths_are_kept(tmp_path):
    manifest = manifest_from_dict(manifest_data(ground_truth={"path": "/data/gt.u16"}), str(tmp_path))
    assert manifest.ground_truth_path == "/data/gt.u16"


def test_unknown_manifest():
    with pytest.raises(DataError, match="Manifest not found"):
        load_manifest("mars_orbiter")


def test_yaml_error_reports_line(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("name: toy\ncube:\n  format: raw\n  path: [unclosed\n")

    with pytest.raises(DataError, match="Invalid manifest YAML") as error:
        load_manifest(str(path))
    assert error.value.line is not None
    assert error.value.path == str(path)


def test_schema_error(tmp_path):
    path = tmp_path / "toy.yaml"
    path.write_text(yaml.safe_dump(manifest_data(palette=[[0, 0, 0]])))

    with pytest.raises(DataError, match="palette"):
        load_manifest(str(path))


def test_inline_sidecar_is_returned(toy_manifest):
    assert load_sidecar(toy_manifest)["interleave"] == "bip"


def test_missing_sidecar_file(tmp_path):
    manifest = manifest_from_dict(manifest_data(cube={"format": "raw", "path": "c.raw", "sidecar": "c.json"}), "/x")
    with pytest.raises(DataError, match="Cannot read sidecar"):
        load_sidecar(manifest)
