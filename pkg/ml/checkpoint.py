"""
Model checkpoint file.

Layout (little-endian):
    4 bytes   magic b"SVDM"
    uint32    format version
    uint32    length L of the JSON header
    L bytes   UTF-8 JSON header: config echo, input size, tensor names and
              shapes in storage order, dense activations
    float64   every tensor in header order, then the normalization mean,
              scale, step mean and step scale (M values each), then the
              loss history
"""

import json
import struct

import numpy as np

from ml.dense import DenseLayer, DenseParams
from ml.lstm import LSTMParams
from ml.model import LSTMModel, ModelConfig, Normalization
from utils.exceptions import FormatError

MAGIC = b"SVDM"
VERSION = 2
_PREFIX = struct.Struct("<4sII")


def save_checkpoint(path, model):
    """Write a trained model to ``path``."""
    params = model.parameters()
    header = {
        "config": model.config.to_dict(),
        "input_size": model.input_size,
        "tensors": [[name, list(value.shape)] for name, value in params.items()],
        "activations": [layer.activation for layer in model.dense.layers],
        "history_length": len(model.loss_history),
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    payload = [value.astype("<f8").tobytes() for value in params.values()]
    payload.append(model.normalization.mean.astype("<f8").tobytes())
    payload.append(model.normalization.scale.astype("<f8").tobytes())
    payload.append(model.normalization.step_mean.astype("<f8").tobytes())
    payload.append(model.normalization.step_scale.astype("<f8").tobytes())
    payload.append(np.asarray(model.loss_history, dtype="<f8").tobytes())
    with open(path, "wb") as handle:
        handle.write(_PREFIX.pack(MAGIC, VERSION, len(blob)))
        handle.write(blob)
        for chunk in payload:
            handle.write(chunk)


def load_checkpoint(path):
    """Read a checkpoint written by ``save_checkpoint``."""
    with open(path, "rb") as handle:
        prefix = handle.read(_PREFIX.size)
        if len(prefix) != _PREFIX.size:
            raise FormatError(f"{path}: truncated checkpoint")
        magic, version, length = _PREFIX.unpack(prefix)
        if magic != MAGIC or version != VERSION:
            raise FormatError(f"{path}: not a version-{VERSION} model checkpoint")
        try:
            header = json.loads(handle.read(length).decode("utf-8"))
        except ValueError as exc:
            raise FormatError(f"{path}: corrupt checkpoint header") from exc
        data = np.frombuffer(handle.read(), dtype="<f8").astype(float)

    tensors, offset = {}, 0
    for name, shape in header["tensors"]:
        size = int(np.prod(shape))
        tensors[name] = data[offset:offset + size].reshape(shape).copy()
        offset += size
    M = header["input_size"]
    stats = [data[offset + i * M:offset + (i + 1) * M].copy() for i in range(4)]
    history = data[offset + 4 * M:].tolist()
    if len(history) != header["history_length"]:
        raise FormatError(f"{path}: checkpoint payload size mismatch")

    config_data = dict(header["config"])
    config_data["dense_widths"] = tuple(config_data["dense_widths"])
    config = ModelConfig(**config_data)
    lstm = LSTMParams(**{name: tensors[name] for name in tensors if not name.startswith("dense")})
    layers = [
        DenseLayer(tensors[f"dense{i}_W"], tensors[f"dense{i}_b"], activation)
        for i, activation in enumerate(header["activations"])
    ]
    return LSTMModel(lstm, DenseParams(layers), Normalization(*stats), config, history)
