import logging
import os

from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn

from hybridsn_cli.commands.pipeline import PipelineHandler, load_prepared_scene
from hybridsn_cli.config import RunConfig
from hybridsn_cli.model import SeHybridSnModel, save_checkpoint
from hybridsn_cli.preprocess import SplitAssignment
from hybridsn_cli.store import STORE_AGGREGATE_KEY, STORE_RUNS_KEY, Store
from hybridsn_cli.training import EpochRecord, TrainReport, run_repeated

logger = logging.getLogger(__name__)

AGGREGATE_REPORT_FILE = "aggregate_report.json"
CHECKPOINT_DIR = "checkpoints"
SPLIT_DIR = "splits"


def run_files(index: int) -> dict[str, str]:
    """Artifact paths of run ``index``, relative to the output directory."""
    return {
        "checkpoint": os.path.join(CHECKPOINT_DIR, f"run_{index:02d}.ckpt"),
        "report": f"train_report_run_{index:02d}.json",
        "curves": f"curves_run_{index:02d}.csv",
        "split": os.path.join(SPLIT_DIR, f"run_{index:02d}.json"),
    }


class TrainHandler(PipelineHandler):
    error_title = "Training Error"

    def run_pipeline(self, config: RunConfig, store: Store, **kwargs) -> int:
        scene = load_prepared_scene(config, store)
        training = config.training
        os.makedirs(config.output_path(CHECKPOINT_DIR), exist_ok=True)
        os.makedirs(config.output_path(SPLIT_DIR), exist_ok=True)

        recorded: list[dict] = []
        progress = Progress(
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
        )
        task = progress.add_task("Training", total=training.repeats * training.max_epochs)

        def on_epoch(run: int, record: EpochRecord) -> None:
            progress.update(
                task,
                advance=1,
                description=f"Run {run + 1}/{training.repeats} epoch {record.epoch} val OA {100 * record.val_oa:.2f}",
            )

        def on_run(index: int, model: SeHybridSnModel, report: TrainReport, split: SplitAssignment) -> None:
            files = run_files(index)
            save_checkpoint(model, config.output_path(files["checkpoint"]))
            with open(config.output_path(files["report"]), "w") as handle:
                handle.write(report.dumps())
            report.write_curves(config.output_path(files["curves"]))
            with open(config.output_path(files["split"]), "w") as handle:
                handle.write(split.dumps())

            recorded.append({"run": index, "seed": report.seed, **files})
            progress.update(task, completed=(index + 1) * training.max_epochs)
            logger.info("Run %d finished at epoch %d", index, report.selected_epoch)

        with progress:
            result = run_repeated(
                config.model,
                training,
                scene.cube,
                scene.gt,
                config.preprocess.fractions,
                config.seed,
                on_run=on_run,
                on_epoch=on_epoch,
            )

        with open(config.output_path(AGGREGATE_REPORT_FILE), "w") as handle:
            handle.write(result.dumps())
        store.set(STORE_RUNS_KEY, recorded)
        store.set(STORE_AGGREGATE_KEY, AGGREGATE_REPORT_FILE)

        title = f"{config.model.architecture}: mean ± std over runs"
        self.formatter.print_table(self.formatter.aggregate_table(result, config.manifest.class_names, title=title))
        if result.failures:
            failed = ", ".join(
                f"run {failure['run']} ({failure['error_type']}: {failure['error']})" for failure in result.failures
            )
            self.formatter.print_warning_panel(f"{len(result.failures)} runs failed: {failed}", title="Failed Runs")

        self.formatter.print_success_panel(
            f"Trained {result.completed} of {training.repeats} runs, reports written to {config.output_dir}"
        )
        return 0
