from pathlib import Path

import numpy as np
import pytest
import yaml
from click.testing import CliRunner

from hybridsn_cli.cli import cli
from tests.factories import BANDS, CLASS_NAMES, HEIGHT, PALETTE, RUN_CONFIG_TOML, WIDTH, toy_labels


@pytest.fixture
def cli_runner():
    return CliRunner()


@pytest.fixture
def manifest_path(tmp_path) -> Path:
    """Raw little-endian f64 BIP scene with class-dependent spectra, one band to discard."""
    data_dir = tmp_path / "data"
    data_dir.mkdir()

    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(21)))
    labels = toy_labels()
    prototypes = rng.normal(size=(len(CLASS_NAMES) + 1, BANDS)) * 3.0
    cube = prototypes[labels] + 0.2 * rng.normal(size=(HEIGHT, WIDTH, BANDS))
    np.ascontiguousarray(cube, dtype="<f8").tofile(data_dir / "toy.raw")
    np.ascontiguousarray(labels, dtype="<u2").tofile(data_dir / "toy_gt.u16")

    manifest = {
        "name": "toy",
        "cube": {
            "format": "raw",
            "path": "toy.raw",
            "sidecar": {
                "lines": HEIGHT,
                "samples": WIDTH,
                "bands": BANDS,
                "dtype": "f64",
                "interleave": "bip",
                "byte_order": "le",
            },
        },
        "ground_truth": {"path": "toy_gt.u16"},
        "bands_to_discard": [BANDS - 1],
        "class_names": CLASS_NAMES,
        "palette": PALETTE,
    }
    path = data_dir / "toy.yaml"
    path.write_text(yaml.safe_dump(manifest, sort_keys=False))
    return path


@pytest.fixture
def out_dir(tmp_path) -> Path:
    return tmp_path / "out"


@pytest.fixture
def run_config(tmp_path, manifest_path, out_dir) -> Path:
    path = tmp_path / "run.toml"
    path.write_text(RUN_CONFIG_TOML.format(manifest=manifest_path, out=out_dir))
    return path


@pytest.fixture
def prepared(cli_runner, run_config, out_dir) -> Path:
    result = cli_runner.invoke(cli, ["prepare", "--config", str(run_config)])
    assert result.exit_code == 0, result.output
    return out_dir


@pytest.fixture
def trained(cli_runner, run_config, prepared) -> Path:
    result = cli_runner.invoke(cli, ["train", "--config", str(run_config)])
    assert result.exit_code == 0, result.output
    return prepared
