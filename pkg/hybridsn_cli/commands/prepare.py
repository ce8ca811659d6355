import csv
import logging

import numpy as np

from hybridsn_cli.commands.pipeline import (
    PCA_CUBE_FILE,
    PCA_MODEL_FILE,
    SPLIT_FILE,
    SPLIT_SUMMARY_FILE,
    PipelineHandler,
)
from hybridsn_cli.config import RunConfig
from hybridsn_cli.data import discard_bands, load_cube, load_ground_truth
from hybridsn_cli.preprocess import Role, SplitAssignment, apply_pca, fit_pca, standardize_bands, stratified_split
from hybridsn_cli.store import (
    STORE_DATASET_KEY,
    STORE_PCA_CUBE_KEY,
    STORE_PCA_MODEL_KEY,
    STORE_SPLIT_KEY,
    Store,
)

logger = logging.getLogger(__name__)


def split_rows(split: SplitAssignment, class_names: list[str]) -> list[tuple]:
    """Per-class (number, name, training, validation, testing, total) rows."""
    counts = [split.counts(role) for role in Role]
    return [
        (index + 1, name, *(int(c[index]) for c in counts), int(sum(c[index] for c in counts)))
        for index, name in enumerate(class_names)
    ]


def write_split_summary(path: str, rows: list[tuple]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["Number", "Class", "Training", "Validation", "Testing", "Total"])
        writer.writerows(rows)
        writer.writerow(["", "Total", *(sum(row[column] for row in rows) for column in range(2, 6))])


class PrepareHandler(PipelineHandler):
    error_title = "Prepare Error"

    def run_pipeline(self, config: RunConfig, store: Store, **kwargs) -> int:
        manifest = config.manifest
        preprocess = config.preprocess

        cube = load_cube(manifest)
        gt = load_ground_truth(manifest.ground_truth_path, cube.height, cube.width, manifest.num_classes)
        gt.check_matches(cube)
        logger.info("Loaded %s: %dx%d pixels, %d bands", manifest.name, cube.height, cube.width, cube.bands)

        cube = discard_bands(cube, manifest.bands_to_discard)
        if preprocess.standardize:
            cube = standardize_bands(cube)
        pca = fit_pca(cube, preprocess.pca_k)
        reduced = apply_pca(cube, pca)
        split = stratified_split(gt, *preprocess.fractions, config.seed)

        np.save(config.output_path(PCA_CUBE_FILE), reduced.data, allow_pickle=False)
        pca.save(config.output_path(PCA_MODEL_FILE))
        with open(config.output_path(SPLIT_FILE), "w") as handle:
            handle.write(split.dumps())

        rows = split_rows(split, manifest.class_names)
        write_split_summary(config.output_path(SPLIT_SUMMARY_FILE), rows)

        store.set(STORE_DATASET_KEY, config.dataset)
        store.set(STORE_PCA_CUBE_KEY, PCA_CUBE_FILE)
        store.set(STORE_PCA_MODEL_KEY, PCA_MODEL_FILE)
        store.set(STORE_SPLIT_KEY, SPLIT_FILE)

        self.formatter.print_table(self.formatter.split_table(rows, title=f"Samples per class, {manifest.name}"))
        if split.flagged_classes:
            self.formatter.print_warning_panel(
                f"Classes {', '.join(str(c) for c in split.flagged_classes)} have fewer than 3 labeled pixels "
                "and cannot fill every role",
                title="Tiny Classes",
            )
        train_total, val_total, test_total = split.totals()
        self.formatter.print_success_panel(
            f"Prepared {manifest.name} in {config.output_dir}: {reduced.bands} components, "
            f"{train_total} training, {val_total} validation, {test_total} testing pixels"
        )
        return 0
