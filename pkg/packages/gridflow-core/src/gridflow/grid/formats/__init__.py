"""Case-file dialects. Importing this package registers the built-in dialects."""

from gridflow.grid.formats.base import CaseFormat
from gridflow.grid.formats.matpower import MatpowerFormat
from gridflow.grid.formats.native import NativeFormat
from gridflow.grid.formats.registry import FormatRegistry

__all__ = ["CaseFormat", "FormatRegistry", "MatpowerFormat", "NativeFormat"]
