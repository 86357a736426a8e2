"""Domain-specific exceptions for gridflow."""


class GridflowError(Exception):
    """Base exception for all gridflow errors."""

    pass


class CaseError(GridflowError):
    """Invalid case file or network model."""

    pass


class CaseSyntaxError(CaseError):
    """Case text could not be tokenized or decoded."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UnknownBusError(CaseError):
    """A branch, generator or area map references a bus that does not exist."""

    def __init__(self, bus_id: int, context: str = "") -> None:
        suffix = f" (referenced by {context})" if context else ""
        super().__init__(f"Unknown bus {bus_id}{suffix}")
        self.bus_id = bus_id


class DuplicateBusError(CaseError):
    """Two buses share one external id."""

    def __init__(self, bus_id: int) -> None:
        super().__init__(f"Duplicate bus id {bus_id}")
        self.bus_id = bus_id


class ZeroReactanceError(CaseError):
    """A branch has zero series reactance."""

    def __init__(self, branch: int, from_bus: int, to_bus: int) -> None:
        super().__init__(f"Branch {branch} ({from_bus}-{to_bus}) has zero reactance")
        self.branch = branch


class NoSlackBusError(CaseError):
    """The case designates no slack bus."""

    def __init__(self) -> None:
        super().__init__("Case has no slack bus")


class MissingGeneratorError(CaseError):
    """A PV or slack bus has no in-service generator."""

    def __init__(self, bus_id: int) -> None:
        super().__init__(f"Bus {bus_id} is PV/slack but has no in-service generator")
        self.bus_id = bus_id


class UnsupportedFormatError(CaseError):
    """Case text matches no registered dialect."""

    pass


class AdmittanceError(GridflowError):
    """Network cannot be turned into admittance matrices."""

    pass


class ZeroImpedanceError(AdmittanceError):
    """A branch has r = x = 0 (or x = 0 where 1/x is required)."""

    def __init__(self, branch: int) -> None:
        super().__init__(f"Branch {branch} has zero impedance")
        self.branch = branch


class SparseKernelError(GridflowError):
    """Base exception for ordering, factorization and solve errors."""

    pass


class AsymmetricPatternError(SparseKernelError):
    """Sparsity pattern is not structurally symmetric."""

    def __init__(self) -> None:
        super().__init__("Sparsity pattern is not symmetric")


class EliminationTreeError(SparseKernelError):
    """Parent array is not a forest."""

    pass


class FactorizationError(SparseKernelError):
    """Non-positive pivot during Cholesky factorization."""

    def __init__(self, column: int, original_index: int, pivot: float) -> None:
        super().__init__(
            f"Non-positive pivot {pivot:.6g} at permuted column {column} "
            f"(original index {original_index}); matrix is not positive definite"
        )
        self.column = column
        self.original_index = original_index
        self.pivot = pivot


class DimensionMismatchError(SparseKernelError):
    """Vector length does not match the factor dimension."""

    def __init__(self, expected: int, actual: int) -> None:
        super().__init__(f"Expected vector of length {expected}, got {actual}")
        self.expected = expected
        self.actual = actual


class PartitionError(GridflowError):
    """Area map cannot be turned into isolated, solvable areas."""

    pass


class UnassignedBusError(PartitionError):
    """A bus is missing from the area map."""

    def __init__(self, bus_id: int) -> None:
        super().__init__(f"bus {bus_id} unassigned")
        self.bus_id = bus_id


class DisconnectedAreaError(PartitionError):
    """An area splits into several islands once inter-area branches are removed."""

    def __init__(self, area: int, components: int) -> None:
        super().__init__(
            f"area {area} is disconnected ({components} islands) after removing "
            "inter-area branches"
        )
        self.area = area
        self.components = components


class NoGeneratorInAreaError(PartitionError):
    """An area has no generator bus to act as its slack."""

    def __init__(self, area: int) -> None:
        super().__init__(
            f"area {area} has no in-service generator bus for a slack; revise the area map"
        )
        self.area = area


class AreaMapSyntaxError(PartitionError):
    """Malformed area-map line."""

    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"area map line {line}: {message}")
        self.line = line


class SolutionMismatchError(GridflowError):
    """Two solutions do not cover the same buses."""

    pass


class ReportError(GridflowError):
    """A report file cannot be read back."""

    pass


class SlacklessIslandError(CaseError):
    """A connected component of the network has no slack bus."""

    def __init__(self, buses: list[int]) -> None:
        preview = ", ".join(str(bus) for bus in buses[:5])
        more = "..." if len(buses) > 5 else ""
        super().__init__(f"Island without slack bus: {preview}{more}")
        self.buses = buses
