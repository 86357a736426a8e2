"""Registry for discovering case-file dialects."""

from typing import ClassVar

from gridflow.exceptions import UnsupportedFormatError
from gridflow.grid.formats.base import CaseFormat


class FormatRegistry:
    """Central registry of case-file dialects.

    Use the @FormatRegistry.register decorator to register dialect classes,
    then look them up by name, by file suffix or by sniffing the text.
    """

    _formats: ClassVar[dict[str, type[CaseFormat]]] = {}
    _instances: ClassVar[dict[str, CaseFormat]] = {}

    @classmethod
    def register(cls, format_class: type[CaseFormat]) -> type[CaseFormat]:
        """Decorator to register a dialect class.

        Args:
            format_class: Dialect class to register.

        Returns:
            The same class (for use as decorator).
        """
        instance = format_class()
        cls._formats[instance.name] = format_class
        cls._instances[instance.name] = instance
        return format_class

    @classmethod
    def get(cls, name: str) -> CaseFormat:
        """Get a dialect instance by name.

        Raises:
            UnsupportedFormatError: If no dialect has that name.
        """
        try:
            return cls._instances[name]
        except KeyError:
            known = ", ".join(sorted(cls._instances))
            raise UnsupportedFormatError(
                f"Unknown case dialect {name!r} (known: {known})"
            ) from None

    @classmethod
    def for_suffix(cls, suffix: str) -> CaseFormat | None:
        """Dialect conventionally using a file suffix, if any."""
        for instance in cls._instances.values():
            if suffix.lower() in instance.suffixes:
                return instance
        return None

    @classmethod
    def detect(cls, text: str) -> CaseFormat:
        """Find the dialect whose sniffing test accepts the text.

        Raises:
            UnsupportedFormatError: If no registered dialect recognises the text.
        """
        for instance in cls._instances.values():
            if instance.detect(text):
                return instance
        raise UnsupportedFormatError(
            "Case text is neither a MatPower-style case nor a native JSON case"
        )

    @classmethod
    def list_formats(cls) -> list[str]:
        """List all registered dialect names."""
        return list(cls._formats.keys())
