import copy
import pathlib as pt

import pytest

import pyHTSecrecy
from pyHTSecrecy.cli import read_yaml

BUNDLED_EXAMPLE = pt.Path(pyHTSecrecy.__file__).parent / "bin" / "example_fig2.yaml"

FULL_MODEL = {
    "name": "binary_full",
    "alphabets": {"x": 2, "y": 3, "z": 2},
    "px": [0.8, 0.2],
    "pyx": [[0.6, 0.0, 0.4], [0.0, 0.6, 0.4]],
    "eve_mode": "FULL",
    "pzxy": [[0.9, 0.1], [0.9, 0.1], [0.7, 0.3], [0.1, 0.9], [0.1, 0.9], [0.3, 0.7]],
}


@pytest.fixture
def example_data():
    """The bundled example configuration as a mutable tree."""
    data, _ = read_yaml(BUNDLED_EXAMPLE)
    return copy.deepcopy(data)


@pytest.fixture
def full_data():
    return {
        "model": copy.deepcopy(FULL_MODEL),
        "optimizer": {"u_size": 2, "restarts": 2},
        "simulate": {
            "aux": [[0.9, 0.1], [0.1, 0.9]],
            "rate_margin": 0.25,
            "epsilon": 0.2,
            "n": [4],
        },
    }


@pytest.fixture
def write_yaml(tmp_path):
    import yaml

    def _write(data, name="run.yaml"):
        path = tmp_path / name
        path.write_text(yaml.safe_dump(data), encoding="utf-8")
        return path

    return _write
