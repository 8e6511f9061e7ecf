import json
import math

import numpy as np
import pytest

from network_aggregation.utils.file_utils import (
    atomic_write_bytes, atomic_write_json, config_hash, json_safe,
    sha256_bytes, sha256_file)


def test_atomic_write(tmp_path):
    path = tmp_path / "nested" / "dir" / "payload.bin"
    atomic_write_bytes(path, b"first")
    atomic_write_bytes(path, b"second")
    assert path.read_bytes() == b"second"
    assert sha256_file(path) == sha256_bytes(b"second")
    assert [entry.name for entry in path.parent.iterdir()] == ["payload.bin"]


def test_failed_write_leaves_no_temp_file(tmp_path):
    with pytest.raises(TypeError):
        atomic_write_bytes(tmp_path / "payload.bin", "not bytes")
    assert not list(tmp_path.iterdir())


def test_json_safe():
    converted = json_safe({1: np.float64(0.5), "array": np.arange(3),
                           "nan": math.nan, "nested": (np.int64(2),
                                                       [-math.inf])})
    assert converted == {"1": 0.5, "array": [0, 1, 2], "nan": None,
                         "nested": [2, [None]]}
    json.dumps(converted, allow_nan=False)


def test_atomic_write_json(tmp_path):
    path = tmp_path / "report.json"
    atomic_write_json(path, {"b": np.float32(1.5), "a": math.nan})
    assert json.loads(path.read_text(encoding="utf-8")) == {"a": None,
                                                            "b": 1.5}


def test_config_hash():
    assert config_hash({"a": 1, "b": [1, 2]}) == \
        config_hash({"b": [1, 2], "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})
    assert len(config_hash({})) == 16
