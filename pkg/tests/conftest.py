"""
Shared fixtures: small meshes, a tiny experiment and its offline artifacts.
"""

import json

import numpy as np
import pytest

from cli.config import parse_config
from fem import build_mesh, h1_gram
from observation import build_observable_space, build_patch_grid
from svda.offline import offline

TINY_CONFIG = {
    "version": 1,
    "name": "tiny",
    "mode": "future",
    "mesh": {"nx": 6, "ny": 6},
    "time": {"T": 2.5, "K": 12, "k_off": 6},
    "sensors": {"side_count": 3, "halfwidth": 0.2, "margin": 0.5},
    "reduction": {"N": 2, "snapshot_stride": 2},
    "ml": {"lb": 1, "hidden": 4, "widths": [4], "lr": 1e-2, "epochs": 20, "seed": 7},
}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def mesh():
    return build_mesh(8, 8)


@pytest.fixture(scope="session")
def gram(mesh):
    return h1_gram(mesh)


@pytest.fixture(scope="session")
def observable(mesh, gram):
    patches = build_patch_grid(3, 0.2, mesh, margin=0.5)
    return build_observable_space(patches, gram, mesh)


@pytest.fixture
def tiny_config_text():
    return json.dumps(TINY_CONFIG, indent=2)


@pytest.fixture(scope="session")
def tiny_config():
    return parse_config(json.dumps(TINY_CONFIG, indent=2))


@pytest.fixture(scope="session")
def parametric_config():
    data = dict(TINY_CONFIG, name="tiny-b", mode="parametric")
    data["physics"] = {"mu_true": 15.0, "mu_bk": 15.0, "mu_test": 17.0}
    return parse_config(json.dumps(data, indent=2))


@pytest.fixture(scope="session")
def tiny_artifacts(tiny_config):
    return offline(tiny_config)


@pytest.fixture
def tiny_config_file(tmp_path, tiny_config_text):
    path = tmp_path / "tiny.json"
    path.write_text(tiny_config_text)
    return path
