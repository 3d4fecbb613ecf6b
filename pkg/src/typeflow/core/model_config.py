"""Model configuration and the named architecture presets."""
from dataclasses import asdict, dataclass, fields, replace
from enum import Enum
from typing import Any, Dict, Tuple

from ..infrastructure.error_handling import SchemaError


class GnnType(Enum):
    RECURRENT = "recurrent"
    CONVOLUTIONAL = "convolutional"


@dataclass
class ModelConfig:
    """Architecture flags and dimensions of a type inference GNN."""
    gnn_type: GnnType = GnnType.RECURRENT
    attention: bool = False
    name_segmentation: bool = False
    contextual_layer: bool = False
    edge_features: bool = True
    K: int = 8
    d_h: int = 128
    d_e: int = 256
    d_seg: int = 32
    d_seg_rnn: int = 32
    d_ctx_rnn: int = 128
    d_name: int = 128
    type_count: int = 100
    preset: str = "rgnn"

    @property
    def recurrent(self) -> bool:
        return self.gnn_type is GnnType.RECURRENT

    @property
    def flags(self) -> Tuple[GnnType, bool, bool, bool, bool]:
        return (self.gnn_type, self.attention, self.name_segmentation, self.contextual_layer, self.edge_features)

    def with_overrides(self, **overrides) -> "ModelConfig":
        """Copy with dimension overrides; architecture flags stay those of the preset."""
        flag_names = {"gnn_type", "attention", "name_segmentation", "contextual_layer", "edge_features", "preset"}
        bad = flag_names.intersection(overrides)
        if bad:
            raise ValueError(f"architecture flags come from the preset, not overrides: {sorted(bad)}")
        return replace(self, **overrides)

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["gnn_type"] = self.gnn_type.value
        return out

    @classmethod
    def from_dict(cls, obj: Dict[str, Any]) -> "ModelConfig":
        if not isinstance(obj, dict):
            raise SchemaError("expected an object", "$.config")
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise SchemaError(f"unknown keys {sorted(unknown)}", "$.config")
        values = dict(obj)
        try:
            values["gnn_type"] = GnnType(values.get("gnn_type", GnnType.RECURRENT.value))
        except ValueError:
            raise SchemaError(f"unknown gnn_type {values.get('gnn_type')!r}", "$.config.gnn_type") from None
        config = cls(**values)
        if PRESET_BY_FLAGS.get(config.flags) != config.preset:
            raise SchemaError(f"flags do not match preset {config.preset!r}", "$.config")
        return config


# flags: gnn_type, attention, name_segmentation, contextual_layer, edge_features
_PRESET_FLAGS = {
    "cgnn": (GnnType.CONVOLUTIONAL, False, False, False, True),
    "rgnn": (GnnType.RECURRENT, False, False, False, True),
    "rgat": (GnnType.RECURRENT, True, False, False, True),
    "rgnn-ns": (GnnType.RECURRENT, False, True, False, True),
    "rgnn-ctx": (GnnType.RECURRENT, False, False, True, True),
    "rgnn-ns-ctx": (GnnType.RECURRENT, False, True, True, True),
    "rgnn-nef": (GnnType.RECURRENT, False, False, False, False),
    "rgat-nef": (GnnType.RECURRENT, True, False, False, False),
}

PRESET_NAMES = tuple(_PRESET_FLAGS)
PRESET_BY_FLAGS = {flags: name for name, flags in _PRESET_FLAGS.items()}


def preset(name: str, **overrides) -> ModelConfig:
    """Build one of the eight architectures, optionally overriding dimensions or K."""
    if name not in _PRESET_FLAGS:
        raise ValueError(f"unknown preset {name!r}; expected one of {', '.join(PRESET_NAMES)}")
    gnn_type, attention, segmentation, contextual, edge_features = _PRESET_FLAGS[name]
    base = ModelConfig(
        gnn_type=gnn_type,
        attention=attention,
        name_segmentation=segmentation,
        contextual_layer=contextual,
        edge_features=edge_features,
        preset=name,
    )
    return base.with_overrides(**overrides) if overrides else base
