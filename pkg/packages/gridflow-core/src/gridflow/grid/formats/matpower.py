"""MatPower-style case dialect (`mpc.bus = [...]` tables in a function file)."""

import logging
import re

import numpy as np

from gridflow.exceptions import CaseSyntaxError
from gridflow.grid.formats.base import CaseFormat
from gridflow.grid.formats.registry import FormatRegistry
from gridflow.grid.models import Network
from gridflow.grid.tables import format_rows, network_from_tables, network_to_tables

logger = logging.getLogger(__name__)

_ASSIGNMENT = re.compile(r"^\s*mpc\.(\w+)\s*=\s*")
_TOKEN = re.compile(r"[^\s,;\]]+|;|\]")
_TABLES = ("bus", "gen", "branch")


def _strip_comment(line: str) -> str:
    cut = line.find("%")
    return line if cut < 0 else line[:cut]


class _TableScanner:
    """Line scanner collecting the numeric tables and scalars of an mpc struct."""

    def __init__(self) -> None:
        self.scalars: dict[str, float] = {}
        self.tables: dict[str, list[list[float]]] = {}
        self.row_lines: dict[str, list[int]] = {}
        self._table: str | None = None
        self._row: list[float] = []
        self._row_start = 0
        self._in_cell = False

    def feed(self, lineno: int, raw: str) -> None:
        line = _strip_comment(raw)
        if self._in_cell:
            self._in_cell = "}" not in line
            return
        offset = 0
        if self._table is None:
            match = _ASSIGNMENT.match(line)
            if match is None:
                return
            name = match.group(1)
            rest = line[match.end() :]
            stripped = rest.strip()
            if stripped.startswith("{"):
                self._in_cell = "}" not in stripped
                return
            if not stripped.startswith("["):
                if name == "baseMVA":
                    self._scalar(name, stripped, lineno, match.end() + 1)
                return
            self._table = name
            self.tables[name] = []
            self.row_lines[name] = []
            offset = match.end() + rest.index("[") + 1
        self._scan_rows(lineno, line, offset)

    def _scalar(self, name: str, text: str, lineno: int, column: int) -> None:
        value = text.rstrip(";").strip()
        try:
            self.scalars[name] = float(value)
        except ValueError:
            raise CaseSyntaxError(
                f"invalid number {value!r} for mpc.{name}", lineno, column
            ) from None

    def _scan_rows(self, lineno: int, line: str, offset: int) -> None:
        assert self._table is not None
        for match in _TOKEN.finditer(line, offset):
            token = match.group()
            if token in (";", "]"):
                self._end_row()
                if token == "]":
                    self._table = None
                    return
                continue
            if not self._row:
                self._row_start = lineno
            try:
                self._row.append(float(token))
            except ValueError:
                raise CaseSyntaxError(
                    f"invalid number {token!r} in mpc.{self._table}", lineno, match.start() + 1
                ) from None
        # A newline also terminates a row.
        self._end_row()

    def _end_row(self) -> None:
        if self._row and self._table is not None:
            self.tables[self._table].append(self._row)
            self.row_lines[self._table].append(self._row_start)
        self._row = []

    def finish(self, lineno: int) -> None:
        if self._table is not None:
            raise CaseSyntaxError(f"unterminated table mpc.{self._table}", lineno, 1)


def scan_tables(text: str) -> tuple[dict[str, float], dict[str, list[list[float]]]]:
    """Extract scalar assignments and numeric tables from MatPower case text.

    Raises:
        CaseSyntaxError: On malformed numbers, ragged rows or missing tables.
    """
    scanner = _TableScanner()
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        scanner.feed(lineno, raw)
    scanner.finish(lineno + 1)

    for name in _TABLES:
        if name not in scanner.tables:
            raise CaseSyntaxError(f"missing table mpc.{name}", lineno + 1, 1)
        rows = scanner.tables[name]
        for row, row_line in zip(rows, scanner.row_lines[name], strict=True):
            if len(row) != len(rows[0]):
                raise CaseSyntaxError(
                    f"mpc.{name} row has {len(row)} values, expected {len(rows[0])}", row_line, 1
                )
    return scanner.scalars, scanner.tables


@FormatRegistry.register
class MatpowerFormat(CaseFormat):
    """MatPower case files: baseMVA plus bus, gen and branch matrices."""

    @property
    def name(self) -> str:
        return "matpower"

    @property
    def suffixes(self) -> tuple[str, ...]:
        return (".m", ".case")

    def detect(self, text: str) -> bool:
        return "mpc." in text

    def read(self, text: str) -> Network:
        scalars, tables = scan_tables(text)
        if "baseMVA" not in scalars:
            raise CaseSyntaxError("missing mpc.baseMVA", 1, 1)
        logger.debug(
            "Scanned MatPower case: %d buses, %d generators, %d branches",
            len(tables["bus"]),
            len(tables["gen"]),
            len(tables["branch"]),
        )
        return network_from_tables(
            scalars["baseMVA"],
            np.array(tables["bus"], dtype=float),
            np.array(tables["gen"], dtype=float),
            np.array(tables["branch"], dtype=float),
        )

    def write(self, net: Network) -> str:
        bus, gen, branch = network_to_tables(net)
        lines = [
            "function mpc = gridflow_case",
            "mpc.version = '2';",
            f"mpc.baseMVA = {net.base_mva!r};",
            "",
            "%% bus data",
            "%\tbus_i\ttype\tPd\tQd\tGs\tBs\tarea\tVm\tVa\tbaseKV\tzone\tVmax\tVmin",
            "mpc.bus = [",
            *format_rows(bus.tolist(), integer_columns=(0, 1, 6, 10)),
            "];",
            "",
            "%% generator data",
            "%\tbus\tPg\tQg\tQmax\tQmin\tVg\tmBase\tstatus\tPmax\tPmin",
            "mpc.gen = [",
            *format_rows(gen.tolist(), integer_columns=(0, 7)),
            "];",
            "",
            "%% branch data",
            "%\tfbus\ttbus\tr\tx\tb\trateA\trateB\trateC\tratio\tangle\tstatus",
            "mpc.branch = [",
            *format_rows(branch.tolist(), integer_columns=(0, 1, 10)),
            "];",
            "",
        ]
        return "\n".join(lines)
