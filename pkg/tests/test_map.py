import numpy as np

from hybridsn_cli.cli import cli
from hybridsn_cli.commands.map import CLASSIFICATION_MAP_FILE, GROUND_TRUTH_MAP_FILE
from hybridsn_cli.data.render import decode_class_map, read_ppm
from tests.factories import HEIGHT, PALETTE, WIDTH, toy_labels


def test_map_covers_the_scene(cli_runner, run_config, trained):
    result = cli_runner.invoke(cli, ["map", "--config", str(run_config)])

    assert result.exit_code == 0, result.output
    path = trained / CLASSIFICATION_MAP_FILE
    assert path.read_bytes().startswith(f"P6\n{WIDTH} {HEIGHT}\n255\n".encode("ascii"))

    predicted = decode_class_map(read_ppm(str(path)), PALETTE)
    assert predicted.shape == (HEIGHT, WIDTH)
    # background stays black, every labeled pixel gets a class
    assert np.all(predicted[0] == 0)
    assert np.all(predicted[1:] >= 1)
    assert not (trained / GROUND_TRUTH_MAP_FILE).exists()


def test_all_pixels_classifies_background(cli_runner, run_config, trained):
    result = cli_runner.invoke(cli, ["map", "--config", str(run_config), "--all-pixels"])

    assert result.exit_code == 0, result.output
    predicted = decode_class_map(read_ppm(str(trained / CLASSIFICATION_MAP_FILE)), PALETTE)
    assert np.all(predicted >= 1)


def test_ground_truth_map(cli_runner, run_config, trained):
    result = cli_runner.invoke(cli, ["map", "--config", str(run_config), "--ground-truth"])

    assert result.exit_code == 0, result.output
    rendered = decode_class_map(read_ppm(str(trained / GROUND_TRUTH_MAP_FILE)), PALETTE)
    np.testing.assert_array_equal(rendered, toy_labels())


def test_map_matches_perfect_predictions(cli_runner, run_config, trained, mocker):
    labels = toy_labels()
    mocker.patch(
        "hybridsn_cli.model.predict.predict_pixels",
        side_effect=lambda model, padded, rows, cols, *args: labels[rows, cols],
    )

    result = cli_runner.invoke(cli, ["map", "--config", str(run_config)])

    assert result.exit_code == 0, result.output
    predicted = decode_class_map(read_ppm(str(trained / CLASSIFICATION_MAP_FILE)), PALETTE)
    np.testing.assert_array_equal(predicted, labels)


def test_map_without_training(cli_runner, run_config, prepared):
    result = cli_runner.invoke(cli, ["map", "--config", str(run_config)])

    assert result.exit_code == 1
    assert "Map Error" in result.output
