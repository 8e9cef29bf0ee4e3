"""
Binary network checkpoints and their key=value metadata sidecars.

Layout (little-endian):

* magic ``b"MLP1"``
* ``uint32`` number of layer widths, then one ``uint32`` per width
* for each layer, weights (row-major ``fan_in x fan_out``) then biases,
  all ``float32``

The output activation is not part of the file; it is supplied on load.
"""

from __future__ import annotations

import os
import struct

import numpy as np

from pyrunshaper.core.errors import CheckpointError
from pyrunshaper.core.neural.mlp import Head, Mlp

MAGIC = b"MLP1"
METADATA_SUFFIX = ".meta"
_PARAM_DTYPE = np.dtype("<f4")


def save_mlp(net: Mlp, path: str) -> None:
    """Write ``net`` as an MLP1 checkpoint (parameters stored as float32)."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", len(net.topology)))
        f.write(struct.pack(f"<{len(net.topology)}I", *net.topology))
        for w, b in zip(net.weights, net.biases):
            f.write(np.ascontiguousarray(w, dtype=_PARAM_DTYPE).tobytes())
            f.write(np.ascontiguousarray(b, dtype=_PARAM_DTYPE).tobytes())


def load_mlp(path: str, head: Head | str = Head.IDENTITY) -> Mlp:
    """
    Read an MLP1 checkpoint.

    Raises:
        CheckpointError: Missing file, wrong magic, or truncated/oversized data
    """
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise CheckpointError(f"Cannot read checkpoint {path}: {e}") from e

    if data[:4] != MAGIC:
        raise CheckpointError(f"{path} is not an MLP1 checkpoint")
    offset = 4
    try:
        (count,) = struct.unpack_from("<I", data, offset)
        offset += 4
        topology = list(struct.unpack_from(f"<{count}I", data, offset))
        offset += 4 * count
    except struct.error as e:
        raise CheckpointError(f"Truncated checkpoint header in {path}") from e
    if count < 2 or any(w < 1 for w in topology):
        raise CheckpointError(f"Invalid topology {topology} in {path}")

    weights, biases = [], []
    for fan_in, fan_out in zip(topology[:-1], topology[1:]):
        for shape in ((fan_in, fan_out), (fan_out,)):
            size = int(np.prod(shape))
            end = offset + size * _PARAM_DTYPE.itemsize
            if end > len(data):
                raise CheckpointError(f"Truncated parameter data in {path}")
            array = np.frombuffer(data, dtype=_PARAM_DTYPE, count=size, offset=offset)
            (weights if len(shape) == 2 else biases).append(
                array.reshape(shape).astype(np.float32))
            offset = end
    if offset != len(data):
        raise CheckpointError(
            f"{path} has {len(data) - offset} unexpected trailing bytes")
    return Mlp.from_parameters(weights, biases, head)


def metadata_path(checkpoint_path: str) -> str:
    return checkpoint_path + METADATA_SUFFIX


def write_metadata(checkpoint_path: str, metadata: dict[str, object]) -> None:
    """Write the human-readable sidecar next to a checkpoint."""
    with open(metadata_path(checkpoint_path), "w", encoding="utf-8") as f:
        for key in sorted(metadata):
            f.write(f"{key}={metadata[key]}\n")


def read_metadata(checkpoint_path: str) -> dict[str, str]:
    """Read a sidecar; a missing sidecar yields an empty dictionary."""
    path = metadata_path(checkpoint_path)
    if not os.path.isfile(path):
        return {}
    metadata = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#") and "=" in line:
                key, value = line.split("=", 1)
                metadata[key.strip()] = value.strip()
    return metadata
