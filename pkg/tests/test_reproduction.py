"""Indian Pines reproduction on the real scene.

Set ``HYBRIDSN_DATA_DIR`` to a directory holding ``indian_pines/`` as the
built-in manifest describes it. Hours of CPU time; run with ``-m slow``.
"""

import csv
import json
import os

import pytest

from hybridsn_cli.cli import cli
from hybridsn_cli.commands.pipeline import SPLIT_SUMMARY_FILE
from hybridsn_cli.commands.train import AGGREGATE_REPORT_FILE
from hybridsn_cli.preprocess.tests.factories import INDIAN_PINES_REPORTED_TRAIN

DATA_DIR = os.environ.get("HYBRIDSN_DATA_DIR")

pytestmark = [
    pytest.mark.slow,
    pytest.mark.skipif(
        not DATA_DIR or not os.path.isdir(os.path.join(DATA_DIR, "indian_pines")),
        reason="HYBRIDSN_DATA_DIR does not hold the Indian Pines files",
    ),
]


def invoke(cli_runner, *args):
    result = cli_runner.invoke(cli, [*args, "--dataset", "indian_pines", "--data-dir", DATA_DIR])
    assert result.exit_code == 0, result.output
    return result


def mean_oa(out_dir):
    with open(os.path.join(out_dir, AGGREGATE_REPORT_FILE)) as handle:
        return json.load(handle)["oa"]["mean"]


def test_indian_pines_five_percent(cli_runner, tmp_path):
    se_out, baseline_out = str(tmp_path / "se"), str(tmp_path / "baseline")

    for out in (se_out, baseline_out):
        invoke(cli_runner, "prepare", "--out", out)

    with open(os.path.join(se_out, SPLIT_SUMMARY_FILE), newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[-1][2:] == ["512", "512", "9225", "10249"]
    for row, reported in zip(rows[1:-1], INDIAN_PINES_REPORTED_TRAIN):
        assert abs(int(row[2]) - reported) <= 1

    invoke(cli_runner, "train", "--out", se_out, "--repeats", "5")
    invoke(cli_runner, "train", "--out", baseline_out, "--repeats", "5", "--architecture", "hybridsn")

    assert mean_oa(se_out) >= 0.91
    assert mean_oa(se_out) > mean_oa(baseline_out)
