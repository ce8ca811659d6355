import rich_click as click
import os
import json

STORE_FILE_NAME = "hybridsn_store.json"

STORE_DATASET_KEY = "dataset"
STORE_PCA_CUBE_KEY = "pca_cube"
STORE_PCA_MODEL_KEY = "pca_model"
STORE_SPLIT_KEY = "split"
STORE_RUNS_KEY = "runs"
STORE_AGGREGATE_KEY = "aggregate_report"


class Store:
    """Artifact index kept in the output directory so later commands find what earlier ones wrote."""

    def __init__(self, directory):
        self.file_path = os.path.join(directory, STORE_FILE_NAME)
        os.makedirs(directory, exist_ok=True)

        # Creates the file with an empty dictionary when it does not exist
        with click.open_file(self.file_path, "a+") as file:
            file.seek(0)
            content = file.read()
            if not content:
                file.write("{}")

    def _read(self):
        with click.open_file(self.file_path, "r") as file:
            return json.loads(file.read())

    def get(self, key, default=None):
        return self._read().get(key, default)

    def set(self, key, value):
        content = self._read()
        content[key] = value

        with click.open_file(self.file_path, "w") as file:
            file.write(json.dumps(content, ensure_ascii=False, sort_keys=True, indent=2))

        return True
