import json

import numpy as np
import pytest

from bmx.documents import serialize
from bmx.hypermatrix import Hypermatrix3, delta


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_complex(rng):
    def make(shape) -> Hypermatrix3:
        data = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        return Hypermatrix3(data)

    return make


@pytest.fixture
def write_value(tmp_path):
    """Serialize a value into ``tmp_path`` and return the path."""

    def write(name: str, value, **metadata):
        path = tmp_path / name
        path.write_text(serialize(value, **metadata))
        return path

    return write


@pytest.fixture
def write_json(tmp_path):
    def write(name: str, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return path

    return write


@pytest.fixture
def delta2_path(write_value):
    return write_value("delta2.json", delta(2))


@pytest.fixture(autouse=True)
def _no_tolerance_override(monkeypatch):
    monkeypatch.delenv("BMX_TOL", raising=False)
