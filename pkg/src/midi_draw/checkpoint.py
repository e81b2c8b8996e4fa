"""Single-file model checkpoints: JSON header line + raw float32 blobs.

Layout: one UTF-8 line ``{"version":1,"hyper":{...},"stats":{...},"tensors":
[{"name":...,"shape":[...],"offset":...},...]}\n`` followed by the tensor
data as little-endian float32, concatenated in declared order.  Offsets are
byte positions relative to the start of the blob region (end of the header
line), so the header can be rewritten without shifting data.
"""

from __future__ import annotations

import json

import numpy as np

from .cvae import MODEL_VERSION, Hyperparams, ModelParams, param_specs
from .dataset import ComponentStats

_HYPER_FIELDS = (
    "embed_dim",
    "enc_hidden",
    "latent_dim",
    "conductor_hidden",
    "dec_hidden",
    "segments",
    "segment_len",
    "batch",
    "epochs",
    "learning_rate",
    "beta_max",
    "beta_warmup_steps",
    "seed",
    "vocab_low",
    "vocab_size",
)


class CheckpointError(ValueError):
    """Unusable checkpoint file (bad version, truncation, shape drift)."""


def save_checkpoint(params: ModelParams, path) -> None:
    h = params.hyper
    tensors = []
    offset = 0
    blobs = []
    for name, shape in param_specs(h):
        t = params.tensors[name]
        if tuple(t.shape) != shape:
            raise CheckpointError(f"tensor {name!r} has shape {t.shape}, expected {shape}")
        blob = np.ascontiguousarray(t, dtype="<f4").tobytes()
        tensors.append({"name": name, "shape": list(shape), "offset": offset})
        blobs.append(blob)
        offset += len(blob)
    header = {
        "version": params.version,
        "hyper": {k: getattr(h, k) for k in _HYPER_FIELDS},
        "stats": {"mean": list(params.stats.mean), "std": list(params.stats.std)},
        "tensors": tensors,
    }
    with open(path, "wb") as f:
        f.write(json.dumps(header, separators=(",", ":")).encode("utf-8"))
        f.write(b"\n")
        for blob in blobs:
            f.write(blob)


def load_checkpoint(path) -> ModelParams:
    with open(path, "rb") as f:
        raw = f.read()
    nl = raw.find(b"\n")
    if nl < 0:
        raise CheckpointError("missing header line")
    try:
        header = json.loads(raw[:nl].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"malformed header: {e}") from e
    version = header.get("version")
    if version != MODEL_VERSION:
        raise CheckpointError(f"version mismatch: file has {version!r}, expected {MODEL_VERSION}")
    try:
        hyper = Hyperparams(**header["hyper"])
        stats = ComponentStats(
            mean=np.asarray(header["stats"]["mean"], dtype=np.float64),
            std=np.asarray(header["stats"]["std"], dtype=np.float64),
        )
        declared = {e["name"]: e for e in header["tensors"]}
    except (KeyError, TypeError, ValueError) as e:
        raise CheckpointError(f"malformed header: {e}") from e

    blob = raw[nl + 1 :]
    tensors = {}
    for name, shape in param_specs(hyper):
        entry = declared.pop(name, None)
        if entry is None:
            raise CheckpointError(f"tensor {name!r} missing from header")
        if tuple(entry["shape"]) != shape:
            raise CheckpointError(
                f"tensor {name!r} has shape {entry['shape']}, expected {list(shape)}"
            )
        count = int(np.prod(shape, dtype=np.int64))
        start = entry["offset"]
        end = start + 4 * count
        if start < 0 or end > len(blob):
            raise CheckpointError(
                f"truncated blob for tensor {name!r}: need bytes [{start},{end}), have {len(blob)}"
            )
        arr = np.frombuffer(blob[start:end], dtype="<f4").reshape(shape)
        tensors[name] = arr.astype(np.float32)
    if declared:
        raise CheckpointError(f"unknown tensors in header: {sorted(declared)}")
    return ModelParams(hyper=hyper, stats=stats, tensors=tensors, version=version)
