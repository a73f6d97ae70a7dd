"""
File formats for nodal fields.

Binary layout (little-endian):
    4 bytes   magic b"SVDA"
    uint32    format version
    uint64    number of nodes
    uint64    K, the index of the last record (records = K + 1)
    float64   (K + 1) * n_nodes values, record after record

CSV layout: one row per node with columns node, x, y, value.
"""

import struct

import numpy as np
import pandas as pd

from utils.exceptions import FormatError

MAGIC = b"SVDA"
VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


def write_fields_binary(path, fields):
    """Write a (records, n_nodes) array of nodal fields."""
    fields = np.atleast_2d(np.asarray(fields, dtype=float))
    if fields.shape[0] == 0:
        raise FormatError("cannot write an empty field sequence")
    with open(path, "wb") as handle:
        handle.write(_HEADER.pack(MAGIC, VERSION, fields.shape[1], fields.shape[0] - 1))
        handle.write(fields.astype("<f8").tobytes())


def read_fields_binary(path):
    """Read a field file back as a (records, n_nodes) float array."""
    with open(path, "rb") as handle:
        header = handle.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise FormatError(f"{path}: truncated header")
        magic, version, n_nodes, last = _HEADER.unpack(header)
        if magic != MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise FormatError(f"{path}: unsupported version {version}")
        payload = handle.read()
    expected = (last + 1) * n_nodes * 8
    if len(payload) != expected:
        raise FormatError(f"{path}: expected {expected} data bytes, found {len(payload)}")
    return np.frombuffer(payload, dtype="<f8").reshape(last + 1, n_nodes).astype(float)


def write_field_csv(path, mesh, values):
    """Write one nodal field as node, x, y, value columns."""
    df = pd.DataFrame({
        'node': np.arange(mesh.node_count),
        'x': mesh.nodes[:, 0],
        'y': mesh.nodes[:, 1],
        'value': np.asarray(values, dtype=float),
    })
    df.to_csv(path, index=False)


def read_field_csv(path):
    """Read a nodal field CSV; returns (coordinates, values) ordered by node."""
    df = pd.read_csv(path)
    missing = {'node', 'x', 'y', 'value'} - set(df.columns)
    if missing:
        raise FormatError(f"{path}: missing columns {sorted(missing)}")
    df = df.sort_values('node')
    return df[['x', 'y']].to_numpy(), df['value'].to_numpy()
