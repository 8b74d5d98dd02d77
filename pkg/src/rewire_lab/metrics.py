"""Efficiency metrics and connectivity lengths for rewired feed-forward graphs.

The efficiency of a node pair is the reciprocal of its shortest-path length
(0 for disconnected pairs), after Latora & Marchiori (2001). Global efficiency
averages this over all ordered pairs; local efficiency averages the efficiency
of each node's neighborhood subgraph. Connectivity lengths are the reciprocals
of the efficiencies, so they behave like harmonic-mean path lengths.

All distances are taken on the undirected view of the directed graph, and
paths inside a neighborhood subgraph may not detour through nodes outside it.

Two neighborhood definitions are supported. The corrected one induces the
subgraph on the nodes directly connected to the center. The same-layer
augmented variant additionally pulls in every other node of the center's
layer, which inflates local efficiency on layered nets whose layer mates
share neighbors. The center itself is excluded under both definitions.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Hashable, Iterable, Sequence

import numpy as np

from .topology import NodeRef, RewiredGraph


class SubgraphDefinition(str, Enum):
    """Which node set forms a center's neighborhood subgraph."""

    CORRECTED = "corrected"
    SAME_LAYER_AUGMENTED = "same_layer_augmented"


@dataclass(frozen=True)
class NeighborhoodSubgraph:
    """Induced neighborhood of one center node; the center is not a member.

    `edges` hold undirected pairs, each ordered by flat id, and both endpoints
    always lie in `nodes`.
    """

    center: NodeRef
    nodes: frozenset[NodeRef]
    edges: frozenset[tuple[NodeRef, NodeRef]]
    definition: SubgraphDefinition


@dataclass(frozen=True)
class EfficiencyReport:
    """Global/local efficiency plus their reciprocal connectivity lengths."""

    e_global: float
    e_local: float
    d_global: float
    d_local: float
    definition: SubgraphDefinition


def _reciprocal_or_inf(value: float) -> float:
    return float("inf") if value == 0.0 else 1.0 / value


def _pair_efficiency_sum(adjacency: Sequence[Iterable[int]]) -> float:
    """Sum of 1/d over all ordered pairs, via breadth-first search per source."""
    count = len(adjacency)
    total = 0.0
    for source in range(count):
        seen = bytearray(count)
        seen[source] = 1
        frontier = [source]
        depth = 0
        while frontier:
            depth += 1
            next_frontier = []
            for node in frontier:
                for neighbor in adjacency[node]:
                    if not seen[neighbor]:
                        seen[neighbor] = 1
                        next_frontier.append(neighbor)
            total += len(next_frontier) / depth
            frontier = next_frontier
    return total


def distance_matrix(nodes: Sequence[Hashable], edges: Iterable[tuple]) -> np.ndarray:
    """Hop-count distances between all pairs of `nodes` over undirected `edges`.

    Rows and columns follow the order of `nodes`; unreachable pairs are inf.
    """
    if len(nodes) == 0:
        raise ValueError("distance_matrix requires a nonempty node set")
    index = {node: i for i, node in enumerate(nodes)}
    if len(index) != len(nodes):
        raise ValueError("nodes must be unique")
    adjacency: list[list[int]] = [[] for _ in nodes]
    for u, v in edges:
        adjacency[index[u]].append(index[v])
        adjacency[index[v]].append(index[u])

    count = len(nodes)
    matrix = np.full((count, count), np.inf)
    for source in range(count):
        matrix[source, source] = 0.0
        queue = deque([source])
        while queue:
            node = queue.popleft()
            for neighbor in adjacency[node]:
                if np.isinf(matrix[source, neighbor]):
                    matrix[source, neighbor] = matrix[source, node] + 1.0
                    queue.append(neighbor)
    return matrix


def graph_efficiency(node_count: int, edges: Iterable[tuple[int, int]]) -> float:
    """Average inverse shortest-path length of an arbitrary undirected graph.

    Nodes are 0..node_count-1; disconnected pairs contribute 0. Returns 0.0
    for graphs with fewer than two nodes.
    """
    if node_count < 2:
        return 0.0
    adjacency: list[set[int]] = [set() for _ in range(node_count)]
    for u, v in edges:
        if u != v:
            adjacency[u].add(v)
            adjacency[v].add(u)
    return _pair_efficiency_sum(adjacency) / (node_count * (node_count - 1))


def global_efficiency(graph: RewiredGraph) -> float:
    """Efficiency averaged over all ordered node pairs of the whole graph."""
    count = graph.node_count
    if count < 2:
        raise ValueError("global_efficiency requires at least 2 nodes")
    total = _pair_efficiency_sum(graph.undirected_adjacency())
    return total / (count * (count - 1))


def _neighborhood_flat(
    graph: RewiredGraph,
    adjacency: Sequence[set[int]],
    center: int,
    definition: SubgraphDefinition,
) -> set[int]:
    members = set(adjacency[center])
    if definition is SubgraphDefinition.SAME_LAYER_AUGMENTED:
        n = graph.shape.neurons_per_layer
        base = graph.shape.layer_of(center) * n
        members.update(range(base, base + n))
    members.discard(center)
    return members


def neighborhood_subgraph(
    graph: RewiredGraph, node: NodeRef, definition: SubgraphDefinition
) -> NeighborhoodSubgraph:
    """Induced subgraph of a node's neighborhood under the given definition."""
    center = node.flat(graph.shape)
    adjacency = graph.undirected_adjacency()
    members = _neighborhood_flat(graph, adjacency, center, definition)

    ref = graph.shape.node_ref
    pairs = []
    for u in members:
        for v in adjacency[u]:
            if v in members and u < v:
                pairs.append((ref(u), ref(v)))
    return NeighborhoodSubgraph(
        center=node,
        nodes=frozenset(ref(u) for u in members),
        edges=frozenset(pairs),
        definition=definition,
    )


def subgraph_efficiency(sub: NeighborhoodSubgraph) -> float:
    """Efficiency of a neighborhood subgraph, distances confined to the subgraph.

    Subgraphs with fewer than two nodes have efficiency 0.
    """
    members = sorted(sub.nodes)
    if len(members) < 2:
        return 0.0
    index = {node: i for i, node in enumerate(members)}
    return graph_efficiency(
        len(members), ((index[u], index[v]) for u, v in sub.edges)
    )


def local_efficiency(graph: RewiredGraph, definition: SubgraphDefinition) -> float:
    """Mean neighborhood-subgraph efficiency over all nodes of the graph."""
    adjacency = graph.undirected_adjacency()
    count = graph.node_count
    total = 0.0
    for center in range(count):
        members = sorted(_neighborhood_flat(graph, adjacency, center, definition))
        if len(members) < 2:
            continue
        index = {flat: i for i, flat in enumerate(members)}
        member_set = set(members)
        pairs = [
            (index[u], index[v])
            for u in members
            for v in adjacency[u]
            if v in member_set and u < v
        ]
        total += graph_efficiency(len(members), pairs)
    return total / count


def efficiency_report(
    graph: RewiredGraph, definition: SubgraphDefinition
) -> EfficiencyReport:
    """Compute global/local efficiency and the corresponding connectivity lengths."""
    e_global = global_efficiency(graph)
    e_local = local_efficiency(graph, definition)
    return EfficiencyReport(
        e_global=e_global,
        e_local=e_local,
        d_global=_reciprocal_or_inf(e_global),
        d_local=_reciprocal_or_inf(e_local),
        definition=definition,
    )
