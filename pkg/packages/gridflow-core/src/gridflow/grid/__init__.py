"""Network model, case-file dialects and structural checks."""

from gridflow.grid.io import load_case, parse_case, save_case, serialize_case
from gridflow.grid.models import Branch, Bus, BusKind, Generator, Network, NetworkArrays
from gridflow.grid.tables import network_from_tables, network_to_tables
from gridflow.grid.topology import Component, validate_topology
from gridflow.grid.validation import validate_network

__all__ = [
    "Branch",
    "Bus",
    "BusKind",
    "Component",
    "Generator",
    "Network",
    "NetworkArrays",
    "load_case",
    "network_from_tables",
    "network_to_tables",
    "parse_case",
    "save_case",
    "serialize_case",
    "validate_network",
    "validate_topology",
]
