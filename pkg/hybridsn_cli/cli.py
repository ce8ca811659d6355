from contextlib import contextmanager

import rich_click as click

from hybridsn_cli.errors import ConfigError
from hybridsn_cli.utils import print_version, setup_logging


@contextmanager
def usage_errors_exit_as_config_errors():
    try:
        yield
    except click.exceptions.UsageError as error:
        error.exit_code = ConfigError.exit_code
        raise


class HybridSNGroup(click.RichGroup):
    """Reports bad flags, bad values and unknown commands with the configuration exit code."""

    def make_context(self, *args, **kwargs):
        with usage_errors_exit_as_config_errors():
            return super().make_context(*args, **kwargs)

    def invoke(self, ctx):
        with usage_errors_exit_as_config_errors():
            return super().invoke(ctx)


def pipeline_options(command):
    """Flags shared by every dataset-driven command."""
    options = [
        click.option(
            "--config",
            "config_path",
            help="Run configuration file (.toml, .yaml or .yml)",
            type=click.Path(exists=True, dir_okay=False),
        ),
        click.option("--dataset", "-d", help="Built-in dataset name or path to a manifest YAML", type=str),
        click.option(
            "--data-dir",
            help="Directory holding the files of a built-in dataset",
            type=click.Path(exists=True, file_okay=False),
        ),
        click.option("--out", "-o", "output_dir", help="Output directory for every artifact", type=click.Path()),
        click.option("--seed", help="Base seed for splits, initialization and dropout", type=click.IntRange(min=0)),
        click.option("--threads", help="Worker threads, defaults to the available cores", type=click.IntRange(min=1)),
        click.option("--repeats", help="Number of independent runs", type=click.IntRange(min=1)),
        click.option("--print-config", is_flag=True, help="Print the resolved configuration and exit"),
        click.option("--verbose", is_flag=True, default=False, help="Debug logging"),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def run_handler(handler, verbose: bool, **kwargs):
    setup_logging(verbose)
    exit_code = handler.execute(**kwargs)
    if exit_code != 0:
        raise click.exceptions.Exit(exit_code)


# Main CLI Group
@click.group(cls=HybridSNGroup)
@click.option(
    "-v",
    "--version",
    is_flag=True,
    callback=print_version,
    expose_value=False,
    is_eager=True,
    help="Show the version and exit.",
)
def cli():
    """SE-HybridSN hyperspectral image classification"""


@cli.command("prepare")
@pipeline_options
def prepare(verbose, **kwargs):
    """Load a dataset, reduce it with PCA and draw the stratified split"""
    from hybridsn_cli.commands.prepare import PrepareHandler

    run_handler(PrepareHandler(), verbose, **kwargs)


@cli.command("train")
@pipeline_options
@click.option(
    "--architecture",
    "-a",
    type=click.Choice(["se-hybridsn", "hybridsn"]),
    help="Network to train, hybridsn is the attention-free baseline",
)
def train(verbose, **kwargs):
    """Train one model per repeat on the prepared dataset"""
    from hybridsn_cli.commands.train import TrainHandler

    run_handler(TrainHandler(), verbose, **kwargs)


@cli.command("eval")
@pipeline_options
@click.option(
    "--checkpoint", "-c", help="Checkpoint to evaluate, defaults to the first trained run", type=click.Path()
)
@click.option("--split", help="Split JSON to evaluate on, defaults to the checkpoint's run split", type=click.Path())
def evaluate(verbose, **kwargs):
    """Report OA, AA, Kappa and per-class accuracy on the test pixels"""
    from hybridsn_cli.commands.eval import EvalHandler

    run_handler(EvalHandler(), verbose, **kwargs)


@cli.command("map")
@pipeline_options
@click.option("--checkpoint", "-c", help="Checkpoint to use, defaults to the first trained run", type=click.Path())
@click.option("--all-pixels", is_flag=True, help="Classify unlabeled background pixels too")
@click.option("--ground-truth", is_flag=True, help="Also render the ground-truth map")
def class_map(verbose, **kwargs):
    """Render the classification map of the whole scene as a PPM image"""
    from hybridsn_cli.commands.map import MapHandler

    run_handler(MapHandler(), verbose, **kwargs)


@cli.command("selfcheck")
@click.option("--seed", default=0, help="Seed of the random test tensors", type=click.IntRange(min=0))
@click.option("--only", multiple=True, help="Run only the named check (repeatable)")
@click.option("--verbose", is_flag=True, default=False, help="Debug logging")
def selfcheck(seed, only, verbose):
    """Gradient checks, reference oracles and round trips"""
    from hybridsn_cli.commands.selfcheck import SelfCheckHandler

    run_handler(SelfCheckHandler(), verbose, seed=seed, only=only)


if __name__ == "__main__":  # pragma: no cover
    cli()
