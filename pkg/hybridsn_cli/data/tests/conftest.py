import pytest

from hybridsn_cli.data.manifest import manifest_from_dict
from hybridsn_cli.data.tests.factories import manifest_data


@pytest.fixture
def toy_manifest(tmp_path):
    return manifest_from_dict(manifest_data(), str(tmp_path), source=str(tmp_path / "toy.yaml"))
