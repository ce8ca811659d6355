from hybridsn_cli.commands.eval import load_matching_model, trained_artifacts
from hybridsn_cli.commands.pipeline import PipelineHandler, load_prepared_scene
from hybridsn_cli.config import RunConfig
from hybridsn_cli.data import render_class_map
from hybridsn_cli.model import predict_scene
from hybridsn_cli.store import Store

CLASSIFICATION_MAP_FILE = "classification_map.ppm"
GROUND_TRUTH_MAP_FILE = "ground_truth.ppm"


class MapHandler(PipelineHandler):
    error_title = "Map Error"

    def run_pipeline(self, config: RunConfig, store: Store, **kwargs) -> int:
        checkpoint, split_path = trained_artifacts(config, store, kwargs.get("checkpoint"), None)
        scene = load_prepared_scene(config, store, split_path=split_path)
        model = load_matching_model(checkpoint, config, scene.cube.bands)
        palette = config.manifest.palette

        labels = predict_scene(
            model,
            scene.cube,
            scene.gt,
            all_pixels=kwargs.get("all_pixels", False),
            batch_size=config.training.eval_batch_size,
            threads=config.training.threads,
        )
        written = [config.output_path(CLASSIFICATION_MAP_FILE)]
        render_class_map(labels, palette, written[0])

        if kwargs.get("ground_truth"):
            written.append(config.output_path(GROUND_TRUTH_MAP_FILE))
            render_class_map(scene.gt.labels, palette, written[1])

        self.formatter.print_success_panel(
            f"{scene.cube.height}x{scene.cube.width} map written to {', '.join(written)}"
        )
        return 0
