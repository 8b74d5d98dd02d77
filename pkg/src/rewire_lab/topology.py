"""Layered feed-forward network graphs and random forward-edge rewiring.

A baseline network fully connects every pair of adjacent layers. Rewiring
removes a chosen number of distinct baseline edges and replaces each with a
fresh forward edge drawn uniformly from the legal candidates, in the spirit
of Watts-Strogatz shortcut creation but restricted to directed forward pairs
so the result stays trainable as a feed-forward net.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

_MAX_SEED = 2**64 - 1
_REJECTION_CAP = 10_000


class RewireSaturationError(RuntimeError):
    """Raised when no legal replacement edge is found within the rejection cap."""


class EdgeListParseError(ValueError):
    """Raised when an edge-list file is malformed; the message names the line."""


@dataclass(frozen=True)
class LayeredShape:
    """Size of a layered feed-forward net: `layers` layers of `neurons_per_layer` each."""

    neurons_per_layer: int
    layers: int

    def __post_init__(self) -> None:
        if self.neurons_per_layer < 1:
            raise ValueError(f"neurons_per_layer must be >= 1, got {self.neurons_per_layer}")
        if self.layers < 2:
            raise ValueError(f"layers must be >= 2, got {self.layers}")

    @property
    def node_count(self) -> int:
        return self.neurons_per_layer * self.layers

    @property
    def baseline_edge_count(self) -> int:
        return (self.layers - 1) * self.neurons_per_layer**2

    def flat_id(self, layer: int, position: int) -> int:
        if not (0 <= layer < self.layers and 0 <= position < self.neurons_per_layer):
            raise ValueError(f"node (layer={layer}, position={position}) out of bounds for {self}")
        return layer * self.neurons_per_layer + position

    def layer_of(self, flat: int) -> int:
        return flat // self.neurons_per_layer

    def node_ref(self, flat: int) -> "NodeRef":
        if not 0 <= flat < self.node_count:
            raise ValueError(f"flat id {flat} out of bounds for {self}")
        n = self.neurons_per_layer
        return NodeRef(flat // n, flat % n)


@dataclass(frozen=True, order=True)
class NodeRef:
    """A neuron addressed by (layer, position); flat id is layer*n + position."""

    layer: int
    position: int

    def flat(self, shape: LayeredShape) -> int:
        return shape.flat_id(self.layer, self.position)


@dataclass(frozen=True)
class RewiredGraph:
    """A layered feed-forward DAG after `n_rewire` random rewirings.

    Edges are (source, target) flat-id pairs, stored sorted ascending. The
    edge count always equals the baseline count of the shape; rewiring swaps
    edges, it never adds or removes capacity.
    """

    shape: LayeredShape
    edges: tuple[tuple[int, int], ...]
    n_rewire: int
    seed: int

    @property
    def node_count(self) -> int:
        return self.shape.node_count

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def undirected_adjacency(self) -> list[set[int]]:
        """Neighbor sets under the undirected view, indexed by flat id."""
        adj: list[set[int]] = [set() for _ in range(self.node_count)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def node_refs(self) -> Iterable[NodeRef]:
        for flat in range(self.node_count):
            yield self.shape.node_ref(flat)


def _baseline_edges(shape: LayeredShape) -> tuple[tuple[int, int], ...]:
    n = shape.neurons_per_layer
    edges = []
    for layer in range(shape.layers - 1):
        base = layer * n
        for p in range(n):
            src = base + p
            for q in range(n):
                edges.append((src, base + n + q))
    # iteration order above is already ascending in (source, target)
    return tuple(edges)


def build_layered_fnn(shape: LayeredShape) -> RewiredGraph:
    """Baseline network: every node in layer l feeds every node in layer l+1."""
    return RewiredGraph(shape=shape, edges=_baseline_edges(shape), n_rewire=0, seed=0)


def _check_seed(seed: int) -> None:
    if not 0 <= seed <= _MAX_SEED:
        raise ValueError(f"seed must be a nonnegative 64-bit integer, got {seed}")


def rewire(graph: RewiredGraph, n_rewire: int, seed: int) -> RewiredGraph:
    """Remove `n_rewire` distinct baseline edges and replace each with a random one.

    Replacement edges are drawn uniformly over all forward node pairs and
    accepted if not already present and not removed in this same pass, so
    every rewiring is a genuine change. Replacements may skip layers.
    Deterministic in (graph, n_rewire, seed).
    """
    if graph.n_rewire != 0:
        raise ValueError("rewire() expects an unrewired baseline graph")
    m = len(graph.edges)
    if not 0 <= n_rewire <= m:
        raise ValueError(f"n_rewire must be in [0, {m}], got {n_rewire}")
    _check_seed(seed)
    if n_rewire == 0:
        return RewiredGraph(graph.shape, graph.edges, 0, seed)

    shape = graph.shape
    n = shape.neurons_per_layer
    layer_pairs = [
        (l1, l2) for l1 in range(shape.layers) for l2 in range(l1 + 1, shape.layers)
    ]
    n_forward_pairs = len(layer_pairs) * n * n

    rng = np.random.default_rng(seed)
    removed_idx = rng.choice(m, size=n_rewire, replace=False)
    removed = {graph.edges[i] for i in removed_idx}
    present = set(graph.edges) - removed

    for _ in range(n_rewire):
        for _attempt in range(_REJECTION_CAP):
            pair = int(rng.integers(n_forward_pairs))
            l1, l2 = layer_pairs[pair // (n * n)]
            within = pair % (n * n)
            candidate = (l1 * n + within // n, l2 * n + within % n)
            if candidate not in present and candidate not in removed:
                present.add(candidate)
                break
        else:
            raise RewireSaturationError(
                f"no legal replacement edge found in {_REJECTION_CAP} attempts "
                f"(shape {shape}, n_rewire {n_rewire})"
            )

    return RewiredGraph(shape, tuple(sorted(present)), n_rewire, seed)


def validate(graph: RewiredGraph) -> list[str]:
    """Check graph invariants; returns one message per violation (empty if clean)."""
    violations: list[str] = []
    shape = graph.shape
    expected = shape.baseline_edge_count
    if len(graph.edges) != expected:
        violations.append(f"edge count {len(graph.edges)} != expected {expected}")
    seen: set[tuple[int, int]] = set()
    for edge in graph.edges:
        u, v = edge
        if edge in seen:
            violations.append(f"duplicate edge {u} -> {v}")
            continue
        seen.add(edge)
        if not (0 <= u < shape.node_count and 0 <= v < shape.node_count):
            violations.append(f"edge {u} -> {v} references a node out of bounds")
            continue
        if shape.layer_of(u) >= shape.layer_of(v):
            violations.append(f"edge {u} -> {v} is not forward")
    if not 0 <= graph.n_rewire <= expected:
        violations.append(f"n_rewire {graph.n_rewire} outside [0, {expected}]")
    return violations


def format_edge_list(graph: RewiredGraph) -> str:
    """Serialize a graph to the edge-list text format.

    Header `layers=L neurons=n n_rewire=k seed=s`, then one
    `source_flat_id target_flat_id` pair per line, sorted ascending.
    """
    shape = graph.shape
    lines = [
        f"layers={shape.layers} neurons={shape.neurons_per_layer} "
        f"n_rewire={graph.n_rewire} seed={graph.seed}"
    ]
    lines.extend(f"{u} {v}" for u, v in sorted(graph.edges))
    return "\n".join(lines) + "\n"


def write_edge_list(graph: RewiredGraph, out: TextIO) -> None:
    out.write(format_edge_list(graph))


def parse_edge_list(text: str, source: str = "<string>") -> RewiredGraph:
    """Parse the edge-list text format; raises EdgeListParseError naming the line."""
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise EdgeListParseError(f"{source}:1: missing header line")

    header: dict[str, int] = {}
    for token in lines[0].split():
        key, sep, value = token.partition("=")
        if not sep:
            raise EdgeListParseError(f"{source}:1: malformed header token {token!r}")
        try:
            header[key] = int(value)
        except ValueError:
            raise EdgeListParseError(
                f"{source}:1: header value for {key!r} is not an integer"
            ) from None
    missing = {"layers", "neurons", "n_rewire", "seed"} - header.keys()
    if missing:
        raise EdgeListParseError(f"{source}:1: header missing keys {sorted(missing)}")

    try:
        shape = LayeredShape(header["neurons"], header["layers"])
    except ValueError as exc:
        raise EdgeListParseError(f"{source}:1: {exc}") from None

    edges: list[tuple[int, int]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListParseError(
                f"{source}:{lineno}: expected 'source target', got {line!r}"
            )
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise EdgeListParseError(
                f"{source}:{lineno}: edge endpoints must be integers, got {line!r}"
            ) from None

    graph = RewiredGraph(shape, tuple(sorted(edges)), header["n_rewire"], header["seed"])
    violations = validate(graph)
    if violations:
        raise EdgeListParseError(f"{source}: invalid graph: " + "; ".join(violations))
    return graph


def read_edge_list(path) -> RewiredGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_edge_list(fh.read(), source=str(path))
