"""
Exports of a ProtocolTrace: the per-agent CSV table and the flat binary
logit dump

Logit dump layout, all little-endian:
    u64 n, u64 D, then the n x D float64 logit matrix in row-major order
    (column j is the j-th agent in protocol order)
"""
import io
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from network_aggregation.errors import LengthMismatch
from network_aggregation.protocol.agent_model import ProtocolTrace
from network_aggregation.utils.file_utils import (
    atomic_write_bytes, atomic_write_text)

PathLike = Union[str, Path]

TRACE_COLUMNS = ["agent_id", "topo_pos", "loss", "grad_norm", "converged",
                 "l1_weight_norm"]

_HEADER_DTYPE = np.dtype("<u8")
_LOGIT_DTYPE = np.dtype("<f8")


def trace_frame(trace: ProtocolTrace) -> pd.DataFrame:
    """
    One row per agent in protocol order
    """
    rows = []
    for position, agent_id in enumerate(trace.order, start=1):
        model = trace.models[agent_id]
        rows.append({"agent_id": agent_id,
                     "topo_pos": position,
                     "loss": model.loss,
                     "grad_norm": model.grad_norm,
                     "converged": model.converged,
                     "l1_weight_norm": model.l1_norm})
    return pd.DataFrame(rows, columns=TRACE_COLUMNS)


def write_trace_csv(trace: ProtocolTrace, path: PathLike):
    """
    Write the per-agent trace table as CSV
    """
    buffer = io.StringIO()
    trace_frame(trace).to_csv(buffer, index=False, float_format="%.17g")
    atomic_write_text(path, buffer.getvalue())


def logit_dump_bytes(trace: ProtocolTrace) -> bytes:
    """
    Encode every logit column of the trace in the flat binary layout
    """
    logit_matrix = np.ascontiguousarray(trace.logit_matrix(),
                                        dtype=_LOGIT_DTYPE)
    header = np.array(logit_matrix.shape, dtype=_HEADER_DTYPE)
    return header.tobytes() + logit_matrix.tobytes(order="C")


def write_logit_dump(trace: ProtocolTrace, path: PathLike):
    atomic_write_bytes(path, logit_dump_bytes(trace))


def read_logit_dump(path: PathLike) -> np.ndarray:
    """
    Read a logit dump back into an n x D float64 matrix

    Raises:
        LengthMismatch: the payload size disagrees with the header
    """
    payload = Path(path).read_bytes()
    header_size = 2 * _HEADER_DTYPE.itemsize
    if len(payload) < header_size:
        raise LengthMismatch(f"{path} is too short for a logit dump header")
    sample_count, agent_count = (
        int(value) for value in np.frombuffer(payload[:header_size],
                                              dtype=_HEADER_DTYPE))
    body = payload[header_size:]
    if len(body) != sample_count * agent_count * _LOGIT_DTYPE.itemsize:
        raise LengthMismatch(
            f"{path} holds {len(body)} bytes of logits, header announces "
            f"{sample_count} x {agent_count}")
    return np.frombuffer(body, dtype=_LOGIT_DTYPE).reshape(
        sample_count, agent_count).astype(np.float64)
