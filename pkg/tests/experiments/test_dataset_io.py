import json

import numpy.testing as npt
import pytest

from network_aggregation.errors import LengthMismatch
from network_aggregation.experiments.dataset_io import (
    dataset_bytes, dataset_from_bytes, read_dataset, sidecar_path,
    write_dataset)
from network_aggregation.utils.file_utils import sha256_file

import tests.data.build_data as b_data


@pytest.fixture
def dataset():
    return b_data.logistic_data(50, [1.0, 2.0], seed=5)


def test_layout(dataset):
    payload = dataset_bytes(dataset)
    assert payload[:4] == b"NIA1"
    assert int.from_bytes(payload[4:12], "little") == 50
    assert int.from_bytes(payload[12:20], "little") == 2
    assert len(payload) == 20 + 50 * 2 * 8 + 50


def test_write_and_read(dataset, tmp_path):
    path = tmp_path / "datasets" / "small.nia"
    checksum = write_dataset(dataset, path, {"k": 2}, seed=11)
    assert checksum == sha256_file(path)

    sidecar = json.loads(sidecar_path(path).read_text(encoding="utf-8"))
    assert sidecar == {"spec": {"k": 2}, "seed": 11, "n": 50, "d": 2,
                       "sha256": checksum}

    loaded = read_dataset(path)
    npt.assert_array_equal(loaded.features, dataset.features)
    npt.assert_array_equal(loaded.labels, dataset.labels)


def test_checksum_mismatch(dataset, tmp_path):
    path = tmp_path / "small.nia"
    write_dataset(dataset, path)
    payload = bytearray(path.read_bytes())
    payload[30] ^= 0xFF
    path.write_bytes(bytes(payload))
    with pytest.raises(LengthMismatch, match="checksum"):
        read_dataset(path)

    # Without a sidecar the corrupted file still decodes
    sidecar_path(path).unlink()
    assert read_dataset(path).n == 50


def test_malformed_payloads(dataset):
    payload = dataset_bytes(dataset)
    with pytest.raises(LengthMismatch):
        dataset_from_bytes(b"NIA2" + payload[4:])
    with pytest.raises(LengthMismatch):
        dataset_from_bytes(payload[:-1])
    with pytest.raises(LengthMismatch):
        dataset_from_bytes(payload[:10])
