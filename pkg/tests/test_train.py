import json

from hybridsn_cli.cli import cli
from hybridsn_cli.commands.train import AGGREGATE_REPORT_FILE, run_files
from hybridsn_cli.model import load_checkpoint
from hybridsn_cli.store import STORE_AGGREGATE_KEY, STORE_RUNS_KEY, Store

BASELINE_MODEL_SECTION = """\
[model]
conv3d_specs = [[2, [3, 3, 3]], [2, [3, 3, 3]]]
conv2d_spec = [4, [3, 3]]
fc_dims = [8, 6]
"""


def test_train_writes_run_artifacts(cli_runner, run_config, prepared):
    result = cli_runner.invoke(cli, ["train", "--config", str(run_config)])

    assert result.exit_code == 0, result.output
    files = run_files(0)
    model = load_checkpoint(prepared / files["checkpoint"])
    assert model.config.window == 5
    assert model.config.num_classes == 3

    report = json.loads((prepared / files["report"]).read_text())
    assert report["seed"] == 3
    assert 1 <= len(report["epochs"]) <= 3
    assert (prepared / files["curves"]).read_text().startswith("epoch,loss,train_accuracy,val_oa")
    assert json.loads((prepared / files["split"]).read_text())["seed"] == 3

    store = Store(str(prepared))
    assert store.get(STORE_RUNS_KEY) == [{"run": 0, "seed": 3, **files}]
    assert store.get(STORE_AGGREGATE_KEY) == AGGREGATE_REPORT_FILE


def test_repeats_flag_aggregates_runs(cli_runner, run_config, prepared):
    result = cli_runner.invoke(cli, ["train", "--config", str(run_config), "--repeats", "3"])

    assert result.exit_code == 0, result.output
    aggregate = json.loads((prepared / AGGREGATE_REPORT_FILE).read_text())
    assert [run["seed"] for run in aggregate["runs"]] == [3, 4, 5]
    assert aggregate["single_run"] is False
    assert len(aggregate["per_class"]) == 3
    assert (prepared / run_files(2)["checkpoint"]).exists()
    assert "Trained 3 of 3 runs" in result.output


def test_same_seed_gives_identical_artifacts(cli_runner, run_config, prepared):
    files = run_files(0)
    outputs = [files["checkpoint"], files["report"], files["curves"], files["split"], AGGREGATE_REPORT_FILE]
    checkpoint = prepared / files["checkpoint"]

    cli_runner.invoke(cli, ["train", "--config", str(run_config), "--seed", "7"])
    first = {name: (prepared / name).read_bytes() for name in outputs}
    cli_runner.invoke(cli, ["train", "--config", str(run_config), "--seed", "7"])

    for name in outputs:
        assert (prepared / name).read_bytes() == first[name], name
    assert load_checkpoint(checkpoint).config.seed == 7


def test_train_baseline_architecture(cli_runner, run_config, prepared):
    text = run_config.read_text()
    text = text[: text.index("[model]")] + BASELINE_MODEL_SECTION + text[text.index("[training]") :]
    run_config.write_text(text.replace("window = 5", "window = 9"))

    result = cli_runner.invoke(cli, ["train", "--config", str(run_config), "--architecture", "hybridsn"])

    assert result.exit_code == 0, result.output
    model = load_checkpoint(prepared / run_files(0)["checkpoint"])
    assert model.config.architecture == "hybridsn"
    assert model.config.head == "flatten"
    assert not model.config.use_se


def test_train_before_prepare(cli_runner, run_config):
    result = cli_runner.invoke(cli, ["train", "--config", str(run_config)])

    assert result.exit_code == 2
    assert "prepare" in result.output


def test_component_mismatch_asks_for_prepare(cli_runner, run_config, prepared):
    run_config.write_text(run_config.read_text().replace("pca_k = 8", "pca_k = 6"))

    result = cli_runner.invoke(cli, ["train", "--config", str(run_config)])

    assert result.exit_code == 1
    assert "prepare" in result.output


def test_divergence_exits_with_numerical_failure(cli_runner, run_config, prepared, mocker):
    mocker.patch("hybridsn_cli.training.trainer.F.softmax_cross_entropy", return_value=(float("nan"), None))

    result = cli_runner.invoke(cli, ["train", "--config", str(run_config)])

    assert result.exit_code == 3
    assert "Training Error" in result.output


def test_invalid_training_value_is_a_usage_error(cli_runner, run_config, prepared):
    run_config.write_text(run_config.read_text().replace("batch_size = 16", "batch_size = 0"))

    result = cli_runner.invoke(cli, ["train", "--config", str(run_config)])

    assert result.exit_code == 1


def test_non_numeric_layer_spec_is_a_usage_error(cli_runner, run_config, prepared):
    text = run_config.read_text().replace("conv2d_spec = [4, [3, 3]]", 'conv2d_spec = ["four", [3, 3]]')
    run_config.write_text(text)

    result = cli_runner.invoke(cli, ["train", "--config", str(run_config)])

    assert result.exit_code == 1
    assert "four" in result.output
