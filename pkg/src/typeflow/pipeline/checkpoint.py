"""Versioned binary checkpoint container."""
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import numpy as np
import torch
from loguru import logger

from ..core.embedding import VocabSizes
from ..core.gnn import TypeFlowGNN
from ..core.model_config import ModelConfig
from ..infrastructure.error_handling import FormatError, IntegrityError, SchemaError
from ..vocab.vocabulary import VocabularyBundle

MAGIC = b"TFGM"
FORMAT_VERSION = 1


@dataclass
class Checkpoint:
    """Model configuration, vocabularies and named float32 parameter tensors."""
    config: ModelConfig
    bundle: VocabularyBundle
    tensors: Dict[str, torch.Tensor]
    metadata: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_model(cls, model: TypeFlowGNN, bundle: VocabularyBundle, metadata: Dict[str, Any] = None) -> "Checkpoint":
        tensors = {name: t.detach().to(torch.float32).clone() for name, t in model.state_dict().items()}
        return cls(model.config, bundle, tensors, dict(metadata or {}))

    def build_model(self) -> TypeFlowGNN:
        """Instantiate the configured model and load the stored parameters into it."""
        model = _fresh_model(self.config, self.bundle)
        _check_against(model, self.tensors)
        model.load_state_dict(self.tensors)
        model.eval()
        return model


def _fresh_model(config: ModelConfig, bundle: VocabularyBundle) -> TypeFlowGNN:
    # parameter layout only; keep the caller's RNG stream untouched
    with torch.random.fork_rng(devices=[]):
        return TypeFlowGNN(config, VocabSizes.from_bundle(bundle))


def _check_against(model: TypeFlowGNN, tensors: Dict[str, torch.Tensor]):
    expected = {name: tuple(t.shape) for name, t in model.state_dict().items()}
    found = {name: tuple(t.shape) for name, t in tensors.items()}
    if expected.keys() != found.keys():
        extra = sorted(found.keys() - expected.keys())
        missing = sorted(expected.keys() - found.keys())
        raise IntegrityError(f"tensor names disagree with config (unexpected {extra}, missing {missing})")
    for name, shape in expected.items():
        if found[name] != shape:
            raise IntegrityError(f"tensor {name} has shape {found[name]}, config implies {shape}")


def save_checkpoint(checkpoint: Checkpoint) -> bytes:
    """
    Serialize to the container layout:

    magic "TFGM" | u32 version | u32 meta length | meta JSON | u32 tensor count |
    per tensor: u16 name length, name, u8 ndim, u32 dims..., little-endian f32 data
    """
    meta = {
        "config": checkpoint.config.to_dict(),
        "vocab": checkpoint.bundle.to_json(),
        "metadata": checkpoint.metadata,
    }
    meta_bytes = json.dumps(meta, sort_keys=True).encode("utf-8")
    parts = [MAGIC, struct.pack("<II", FORMAT_VERSION, len(meta_bytes)), meta_bytes]
    parts.append(struct.pack("<I", len(checkpoint.tensors)))
    for name in sorted(checkpoint.tensors):
        array = checkpoint.tensors[name].detach().cpu().numpy().astype("<f4", copy=False)
        encoded = name.encode("utf-8")
        parts.append(struct.pack("<H", len(encoded)))
        parts.append(encoded)
        parts.append(struct.pack("<B", array.ndim))
        parts.append(struct.pack(f"<{array.ndim}I", *array.shape))
        parts.append(np.ascontiguousarray(array).tobytes())
    return b"".join(parts)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, size: int) -> bytes:
        if self.offset + size > len(self.data):
            raise FormatError(f"truncated checkpoint: need {size} bytes at offset {self.offset}")
        chunk = self.data[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt: str) -> Tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def load_checkpoint(data: bytes) -> Checkpoint:
    """Parse a container; raises FormatError for malformed bytes and IntegrityError for config mismatches."""
    reader = _Reader(data)
    if reader.take(4) != MAGIC:
        raise FormatError("bad magic: not a typeflow checkpoint")
    version, meta_len = reader.unpack("<II")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported checkpoint version {version}")
    try:
        meta = json.loads(reader.take(meta_len).decode("utf-8"))
    except (UnicodeDecodeError, ValueError) as e:
        raise FormatError(f"corrupt metadata block: {e}") from None
    if not isinstance(meta, dict) or "config" not in meta or "vocab" not in meta:
        raise SchemaError("metadata needs 'config' and 'vocab'", "$")
    config = ModelConfig.from_dict(meta["config"])
    bundle = VocabularyBundle.from_json(meta["vocab"])

    (count,) = reader.unpack("<I")
    tensors: Dict[str, torch.Tensor] = {}
    for _ in range(count):
        (name_len,) = reader.unpack("<H")
        try:
            name = reader.take(name_len).decode("utf-8")
        except UnicodeDecodeError:
            raise FormatError("tensor name is not UTF-8") from None
        (ndim,) = reader.unpack("<B")
        shape = reader.unpack(f"<{ndim}I") if ndim else ()
        size = int(np.prod(shape, dtype=np.int64)) if ndim else 1
        array = np.frombuffer(reader.take(4 * size), dtype="<f4").reshape(shape)
        tensors[name] = torch.from_numpy(array.astype(np.float32))
    if reader.offset != len(data):
        raise FormatError(f"{len(data) - reader.offset} trailing bytes after last tensor")

    checkpoint = Checkpoint(config, bundle, tensors, meta.get("metadata", {}))
    _check_against(_fresh_model(config, bundle), tensors)
    return checkpoint


def write_checkpoint(checkpoint: Checkpoint, path: Union[str, Path]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(save_checkpoint(checkpoint))
    logger.info(f"Saved {checkpoint.config.preset} checkpoint to {path}")


def read_checkpoint(path: Union[str, Path]) -> Checkpoint:
    return load_checkpoint(Path(path).read_bytes())
