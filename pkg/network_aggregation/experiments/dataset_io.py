"""
Binary dataset files and their JSON sidecars

Layout, all little-endian:
    magic b"NIA1", u64 n, u64 d, n x d float64 features in row-major order,
    then n labels as single bytes (0 or 1)
The sidecar `<file>.json` holds the instance spec, the seed and the SHA-256
of the binary file.
"""
import json
from pathlib import Path
from typing import Optional, Union

import numpy as np

import network_aggregation.globals as GV
from network_aggregation.domain.dataset import Dataset, make_dataset
from network_aggregation.errors import LengthMismatch
from network_aggregation.utils.file_utils import (
    atomic_write_bytes, atomic_write_json, sha256_bytes)

PathLike = Union[str, Path]

_HEADER_DTYPE = np.dtype("<u8")
_FEATURE_DTYPE = np.dtype("<f8")


def dataset_bytes(dataset: Dataset) -> bytes:
    """
    Encode features and labels in the NIA1 layout
    """
    header = np.array([dataset.n, dataset.d], dtype=_HEADER_DTYPE)
    features = np.ascontiguousarray(dataset.features, dtype=_FEATURE_DTYPE)
    labels = dataset.labels.astype(np.uint8)
    return (GV.DATASET_MAGIC + header.tobytes()
            + features.tobytes(order="C") + labels.tobytes())


def dataset_from_bytes(payload: bytes) -> Dataset:
    """
    Decode a NIA1 payload

    Raises:
        LengthMismatch: wrong magic or a size that disagrees with the header
    """
    magic_size = len(GV.DATASET_MAGIC)
    header_end = magic_size + 2 * _HEADER_DTYPE.itemsize
    if payload[:magic_size] != GV.DATASET_MAGIC or len(payload) < header_end:
        raise LengthMismatch("Payload is not a NIA1 dataset")
    sample_count, feature_count = (
        int(value) for value in np.frombuffer(payload[magic_size:header_end],
                                              dtype=_HEADER_DTYPE))
    feature_end = header_end + \
        sample_count * feature_count * _FEATURE_DTYPE.itemsize
    if len(payload) != feature_end + sample_count:
        raise LengthMismatch(
            f"NIA1 payload of {len(payload)} bytes does not match n="
            f"{sample_count}, d={feature_count}")
    features = np.frombuffer(payload[header_end:feature_end],
                             dtype=_FEATURE_DTYPE).reshape(sample_count,
                                                           feature_count)
    labels = np.frombuffer(payload[feature_end:], dtype=np.uint8)
    return make_dataset(features, labels)


def sidecar_path(path: PathLike) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def write_dataset(dataset: Dataset, path: PathLike,
                  spec: Optional[dict] = None,
                  seed: Optional[int] = None) -> str:
    """
    Write the dataset file and its sidecar

    Args:
        dataset (Dataset): dataset to store
        path (PathLike): destination of the binary file
        spec (dict, optional): generator spec recorded in the sidecar
        seed (int, optional): seed recorded in the sidecar

    Returns:
        str: SHA-256 of the binary file
    """
    payload = dataset_bytes(dataset)
    checksum = sha256_bytes(payload)
    atomic_write_bytes(path, payload)
    atomic_write_json(sidecar_path(path), {"spec": spec,
                                           "seed": seed,
                                           "n": dataset.n,
                                           "d": dataset.d,
                                           "sha256": checksum})
    return checksum


def read_dataset(path: PathLike) -> Dataset:
    """
    Read a NIA1 dataset file, checking it against its sidecar when present

    Raises:
        LengthMismatch: the file is malformed or its checksum disagrees
            with the sidecar
    """
    payload = Path(path).read_bytes()
    sidecar = sidecar_path(path)
    if sidecar.is_file():
        with open(sidecar, "r", encoding="utf-8") as sidecar_file:
            expected = json.load(sidecar_file).get("sha256")
        if expected is not None and expected != sha256_bytes(payload):
            raise LengthMismatch(
                f"{path} does not match the checksum in {sidecar}")
    return dataset_from_bytes(payload)
