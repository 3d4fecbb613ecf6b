"""Type flow graph extraction."""

from .builder import attach_labels, build_tfg
from .prepass import collect_function_decls
from .scopes import resolve_scopes
from .tfg_io import load_tfg, save_tfg, tfg_from_dict, tfg_to_dict
from .validation import ValidationReport, validate_tfg

__all__ = [
    "ValidationReport",
    "attach_labels",
    "build_tfg",
    "collect_function_decls",
    "load_tfg",
    "resolve_scopes",
    "save_tfg",
    "tfg_from_dict",
    "tfg_to_dict",
    "validate_tfg",
]
