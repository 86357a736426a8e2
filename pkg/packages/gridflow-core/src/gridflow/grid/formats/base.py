"""Abstract base class for case-file dialects."""

from abc import ABC, abstractmethod

from gridflow.grid.models import Network


class CaseFormat(ABC):
    """Abstract base class for case-file dialects.

    A dialect turns case text into a validated per-unit Network and back.
    Implement this class and register it with FormatRegistry to add a dialect.
    """

    @property
    @abstractmethod
    def name(self) -> str:
        """Unique dialect identifier."""
        ...

    @property
    def suffixes(self) -> tuple[str, ...]:
        """File suffixes conventionally used by this dialect."""
        return ()

    @abstractmethod
    def detect(self, text: str) -> bool:
        """Whether the text looks like this dialect.

        Args:
            text: Raw case text.
        """
        ...

    @abstractmethod
    def read(self, text: str) -> Network:
        """Parse case text into a validated Network.

        Args:
            text: Raw case text.

        Raises:
            CaseError: On syntax or validation failures.
        """
        ...

    @abstractmethod
    def write(self, net: Network) -> str:
        """Serialize a Network in this dialect.

        Args:
            net: Network to serialize.
        """
        ...
