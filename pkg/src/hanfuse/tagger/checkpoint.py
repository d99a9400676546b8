"""Single-file model checkpoints.

Layout::

    magic    8 bytes   b"HANFUSE\\x00"
    hlen     uint32 LE length of the JSON header
    header   UTF-8 JSON: version, strategy, dims, tag set, parameter table
    blocks   raw little-endian float64 arrays, in header order
"""

import json
import struct

import numpy as np

from ..errors import CheckpointError
from .model import TagSet, TaggerModel

MAGIC = b"HANFUSE\x00"
VERSION = 1


def save_model(model: TaggerModel, path):
    table = []
    offset = 0
    for name, arr in model.params.items():
        table.append({"name": name, "shape": list(arr.shape), "offset": offset})
        offset += arr.size * 8
    header = {
        "version": VERSION,
        "strategy": model.strategy,
        "semantic_dim": model.semantic_dim,
        "hidden": model.hidden,
        "dropout": model.dropout,
        "tags": model.tagset.labels,
        "features": list(model.features),
        "params": table,
    }
    blob = json.dumps(header, ensure_ascii=False).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for arr in model.params.values():
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_model(path) -> TaggerModel:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:8] != MAGIC:
        raise CheckpointError(f"{path}: not a hanfuse checkpoint")
    try:
        (hlen,) = struct.unpack("<I", data[8:12])
        header = json.loads(data[12:12 + hlen].decode("utf-8"))
    except (struct.error, ValueError) as exc:
        raise CheckpointError(f"{path}: unreadable header ({exc})") from None
    if header.get("version") != VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {header.get('version')}")
    body = memoryview(data)[12 + hlen:]
    fuse_dim = None
    for entry in header["params"]:
        if entry["name"] == "fuse.W":
            fuse_dim = entry["shape"][0]
    try:
        expected = TaggerModel.create(
            header["strategy"], TagSet(header["tags"]), header["semantic_dim"],
            hidden=header["hidden"], dropout=header["dropout"], fuse_dim=fuse_dim,
            features=tuple(header.get("features", ("semantic", "glyph", "phonetic"))),
        )
    except Exception as exc:
        raise CheckpointError(f"{path}: inconsistent header ({exc})") from None
    names = [e["name"] for e in header["params"]]
    if sorted(names) != sorted(expected.params):
        raise CheckpointError(f"{path}: parameter names do not match strategy {header['strategy']!r}")
    params = {}
    for entry in header["params"]:
        name, shape, offset = entry["name"], tuple(entry["shape"]), entry["offset"]
        if shape != expected.params[name].shape:
            raise CheckpointError(f"{path}: {name} has shape {shape}, expected {expected.params[name].shape}")
        size = int(np.prod(shape)) * 8
        if offset + size > len(body):
            raise CheckpointError(f"{path}: truncated parameter block {name}")
        params[name] = np.frombuffer(body[offset:offset + size], dtype="<f8").astype(np.float64).reshape(shape)
    expected.params = params
    return expected
