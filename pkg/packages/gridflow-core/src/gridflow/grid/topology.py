"""Connected-component analysis over in-service branches."""

import numpy as np
from pydantic import BaseModel, Field
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from gridflow.grid.models import BusKind, Network


class Component(BaseModel):
    """One electrical island."""

    buses: list[int] = Field(description="Member bus ids in network order")
    has_slack: bool = Field(description="Whether the island contains a slack bus")


def component_labels(n: int, f: np.ndarray, t: np.ndarray) -> tuple[int, np.ndarray]:
    """Label connected components of an undirected graph given by edge endpoints."""
    graph = coo_matrix((np.ones(f.size), (f, t)), shape=(n, n))
    count, labels = connected_components(graph, directed=False)
    return int(count), labels


def validate_topology(net: Network) -> list[Component]:
    """Compute islands over in-service branches and report slack coverage.

    Report-only: callers decide whether a slackless island is an error.

    Args:
        net: Parsed network.

    Returns:
        Components ordered by their first bus in network order.
    """
    live = [br for br in net.branches if br.in_service]
    f = np.array([net.index_of(br.from_bus) for br in live], dtype=np.int64)
    t = np.array([net.index_of(br.to_bus) for br in live], dtype=np.int64)
    count, labels = component_labels(net.n_bus, f, t)

    members: list[list[int]] = [[] for _ in range(count)]
    slack = [False] * count
    for i, bus in enumerate(net.buses):
        label = int(labels[i])
        members[label].append(bus.id)
        slack[label] = slack[label] or bus.kind is BusKind.SLACK
    return [
        Component(buses=buses, has_slack=has_slack)
        for buses, has_slack in zip(members, slack, strict=True)
    ]
