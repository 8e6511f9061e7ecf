"""
Helpers for writing experiment outputs atomically and fingerprinting them
"""
import os
import json
import hashlib
import math
import tempfile
from pathlib import Path
from typing import Union

import numpy as np

PathLike = Union[str, Path]


def atomic_write_bytes(path: PathLike, payload: bytes):
    """
    Write `payload` to `path` through a temporary file in the same
        directory followed by a rename, so readers never see a partial file

    Args:
        path (PathLike): destination file
        payload (bytes): file contents
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    file_descriptor, temp_path = tempfile.mkstemp(
        prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(file_descriptor, "wb") as temp_file:
            temp_file.write(payload)
            temp_file.flush()
            os.fsync(temp_file.fileno())
        os.replace(temp_path, path)
    except BaseException:
        if os.path.exists(temp_path):
            os.remove(temp_path)
        raise


def atomic_write_text(path: PathLike, text: str):
    """
    Text version of atomic_write_bytes, always utf-8
    """
    atomic_write_bytes(path, text.encode("utf-8"))


def atomic_write_json(path: PathLike, payload: dict):
    """
    Write a dictionary as indented, key sorted strict JSON
    """
    atomic_write_text(path, json.dumps(json_safe(payload), indent=2,
                                       sort_keys=True, allow_nan=False))


def sha256_bytes(payload: bytes) -> str:
    """
    Hex SHA-256 digest of `payload`
    """
    return hashlib.sha256(payload).hexdigest()


def sha256_file(path: PathLike) -> str:
    """
    Hex SHA-256 digest of a file read in 1MiB chunks
    """
    digest = hashlib.sha256()
    with open(path, "rb") as file_handle:
        for chunk in iter(lambda: file_handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def config_hash(payload: dict) -> str:
    """
    Short stable fingerprint of a JSON serializable dictionary

    Returns:
        str: first 16 hex digits of the SHA-256 of the sorted-key JSON
    """
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return sha256_bytes(canonical.encode("utf-8"))[:16]


def json_safe(value):
    """
    Recursively convert numpy scalars/arrays to Python values and non-finite
        floats to None so the result is strict JSON
    """
    if isinstance(value, dict):
        return {str(key): json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(item) for item in value]
    if isinstance(value, np.ndarray):
        return json_safe(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value
