import csv
import json

import numpy as np

from hybridsn_cli.cli import cli
from hybridsn_cli.commands.pipeline import PCA_CUBE_FILE, PCA_MODEL_FILE, SPLIT_FILE, SPLIT_SUMMARY_FILE
from hybridsn_cli.config import RESOLVED_CONFIG_FILE
from hybridsn_cli.preprocess import PcaModel
from hybridsn_cli.store import STORE_DATASET_KEY, STORE_SPLIT_KEY, Store
from tests.factories import HEIGHT, WIDTH


def read_summary(out_dir):
    with open(out_dir / SPLIT_SUMMARY_FILE, newline="") as handle:
        return list(csv.reader(handle))


def test_prepare_writes_artifacts(cli_runner, run_config, out_dir):
    result = cli_runner.invoke(cli, ["prepare", "--config", str(run_config)])

    assert result.exit_code == 0, result.output
    assert np.load(out_dir / PCA_CUBE_FILE).shape == (HEIGHT, WIDTH, 8)
    assert PcaModel.load(str(out_dir / PCA_MODEL_FILE)).components.shape == (8, 9)

    split = json.loads((out_dir / SPLIT_FILE).read_text())
    assert split["labeled_pixels"] == (HEIGHT - 1) * WIDTH
    assert split["seed"] == 3

    resolved = json.loads((out_dir / RESOLVED_CONFIG_FILE).read_text())
    assert resolved["preprocess"]["pca_k"] == 8
    assert resolved["model"]["window"] == 5

    store = Store(str(out_dir))
    assert store.get(STORE_DATASET_KEY) == str(run_config.parent / "data" / "toy.yaml")
    assert store.get(STORE_SPLIT_KEY) == SPLIT_FILE


def test_prepare_summary_table(cli_runner, prepared):
    rows = read_summary(prepared)

    assert rows[0] == ["Number", "Class", "Training", "Validation", "Testing", "Total"]
    assert rows[1:4] == [
        ["1", "water", "9", "9", "26", "44"],
        ["2", "field", "9", "9", "26", "44"],
        ["3", "forest", "8", "8", "28", "44"],
    ]
    assert rows[4] == ["", "Total", "26", "26", "80", "132"]


def test_prepare_prints_split_table(cli_runner, run_config):
    result = cli_runner.invoke(cli, ["prepare", "--config", str(run_config)])

    assert "forest" in result.output
    assert "Total" in result.output


def test_prepare_is_idempotent(cli_runner, run_config, prepared):
    cube_bytes = (prepared / PCA_CUBE_FILE).read_bytes()
    split_bytes = (prepared / SPLIT_FILE).read_bytes()
    first_model = PcaModel.load(str(prepared / PCA_MODEL_FILE))

    result = cli_runner.invoke(cli, ["prepare", "--config", str(run_config)])

    assert result.exit_code == 0, result.output
    assert (prepared / PCA_CUBE_FILE).read_bytes() == cube_bytes
    assert (prepared / SPLIT_FILE).read_bytes() == split_bytes
    np.testing.assert_array_equal(PcaModel.load(str(prepared / PCA_MODEL_FILE)).components, first_model.components)


def test_seed_flag_overrides_config(cli_runner, run_config, out_dir):
    cli_runner.invoke(cli, ["prepare", "--config", str(run_config)])
    first = json.loads((out_dir / SPLIT_FILE).read_text())

    result = cli_runner.invoke(cli, ["prepare", "--config", str(run_config), "--seed", "4"])

    assert result.exit_code == 0, result.output
    second = json.loads((out_dir / SPLIT_FILE).read_text())
    assert second["seed"] == 4
    assert second["assignments"] != first["assignments"]


def test_out_flag_overrides_config(cli_runner, run_config, tmp_path):
    other = tmp_path / "elsewhere"

    result = cli_runner.invoke(cli, ["prepare", "--config", str(run_config), "--out", str(other)])

    assert result.exit_code == 0, result.output
    assert (other / SPLIT_FILE).exists()
    assert not (tmp_path / "out").exists()


def test_print_config_writes_nothing(cli_runner, run_config, out_dir):
    result = cli_runner.invoke(cli, ["prepare", "--config", str(run_config), "--print-config", "--threads", "2"])

    assert result.exit_code == 0, result.output
    assert '"pca_k": 8' in result.output
    assert '"threads": 2' in result.output
    assert not out_dir.exists()


def test_missing_cube_is_a_data_error(cli_runner, run_config, manifest_path):
    (manifest_path.parent / "toy.raw").unlink()

    result = cli_runner.invoke(cli, ["prepare", "--config", str(run_config)])

    assert result.exit_code == 2
    assert "Prepare Error" in result.output


def test_truncated_cube_is_a_data_error(cli_runner, run_config, manifest_path):
    raw = manifest_path.parent / "toy.raw"
    raw.write_bytes(raw.read_bytes()[:-8])

    result = cli_runner.invoke(cli, ["prepare", "--config", str(run_config)])

    assert result.exit_code == 2


def test_unknown_config_key_is_a_usage_error(cli_runner, run_config):
    run_config.write_text(run_config.read_text() + "\n[extra]\nvalue = 1\n")

    result = cli_runner.invoke(cli, ["prepare", "--config", str(run_config)])

    assert result.exit_code == 1
    assert "extra" in result.output


def test_too_many_components_is_a_data_error(cli_runner, run_config):
    run_config.write_text(run_config.read_text().replace("pca_k = 8", "pca_k = 10"))

    result = cli_runner.invoke(cli, ["prepare", "--config", str(run_config)])

    assert result.exit_code == 2


def test_unknown_dataset_is_a_data_error(cli_runner, run_config):
    result = cli_runner.invoke(cli, ["prepare", "--config", str(run_config), "--dataset", "nowhere"])

    assert result.exit_code == 2
    assert "indian_pines" in result.output
