"""Reading and writing case files in any registered dialect."""

import logging
from pathlib import Path

from gridflow.exceptions import CaseError
from gridflow.grid.formats import FormatRegistry
from gridflow.grid.models import Network

logger = logging.getLogger(__name__)


def parse_case(text: str, dialect: str | None = None) -> Network:
    """Parse case text into a validated per-unit Network.

    Args:
        text: Case file content.
        dialect: Registered dialect name; sniffed from the text when omitted.

    Returns:
        Validated Network with angles in radians and powers in per-unit.

    Raises:
        CaseError: Syntax errors (with line/column), unknown or duplicate buses,
            zero reactance, missing slack and other validation failures.
    """
    fmt = FormatRegistry.get(dialect) if dialect else FormatRegistry.detect(text)
    net = fmt.read(text)
    logger.debug(
        "Parsed %s case: %d buses, %d branches, %d generators",
        fmt.name,
        net.n_bus,
        len(net.branches),
        len(net.generators),
    )
    return net


def load_case(path: str | Path) -> Network:
    """Read and parse a case file.

    Raises:
        CaseError: If the file cannot be read or parsed.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise CaseError(f"Cannot read case file {path}: {e.strerror or e}") from e
    fmt = FormatRegistry.for_suffix(path.suffix)
    if fmt is not None and not fmt.detect(text):
        fmt = None
    return parse_case(text, fmt.name if fmt else None)


def serialize_case(net: Network, dialect: str = "matpower") -> str:
    """Serialize a Network in the named dialect."""
    return FormatRegistry.get(dialect).write(net)


def save_case(net: Network, path: str | Path, dialect: str | None = None) -> None:
    """Write a Network to a file, choosing the dialect from the suffix when omitted."""
    path = Path(path)
    if dialect is None:
        fmt = FormatRegistry.for_suffix(path.suffix)
        dialect = fmt.name if fmt else "matpower"
    path.write_text(serialize_case(net, dialect), encoding="utf-8")
