"""Graph representation, random instances, distances and graph documents."""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import networkx as nx
import numpy as np

from forecast_planner.exceptions import GraphValidationError

Edge = Tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """Undirected, simple, connected graph with dense node and edge ids.

    Edges are stored as (u, v) with u < v and indexed in insertion order.
    Build instances with :meth:`from_edges`, which enforces the invariants.
    """

    node_count: int
    edges: Tuple[Edge, ...]
    node_adjacency: Tuple[Tuple[int, ...], ...] = field(compare=False, repr=False)
    edge_adjacency: Tuple[Tuple[int, ...], ...] = field(compare=False, repr=False)
    edge_index: Dict[Edge, int] = field(compare=False, repr=False)

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[Sequence[int]]) -> Graph:
        if not isinstance(node_count, int) or isinstance(node_count, bool):
            raise GraphValidationError("Node count must be an integer")
        if node_count < 1:
            raise GraphValidationError(f"Node count must be positive, got {node_count}")

        canonical: List[Edge] = []
        edge_index: Dict[Edge, int] = {}
        for raw in edges:
            if len(raw) != 2:
                raise GraphValidationError(f"Edge {list(raw)} must have two endpoints")
            u, v = raw
            for node in (u, v):
                if not isinstance(node, (int, np.integer)) or isinstance(node, bool):
                    raise GraphValidationError(
                        f"Edge {list(raw)} has a non-integer endpoint"
                    )
                if not 0 <= node < node_count:
                    raise GraphValidationError(
                        f"Edge {list(raw)} references node {node} "
                        f"outside [0, {node_count})"
                    )
            if u == v:
                raise GraphValidationError(f"Self-loop at node {u}")
            edge = (int(min(u, v)), int(max(u, v)))
            if edge in edge_index:
                raise GraphValidationError(f"Duplicate edge {list(edge)}")
            edge_index[edge] = len(canonical)
            canonical.append(edge)

        nx_graph = nx.Graph()
        nx_graph.add_nodes_from(range(node_count))
        nx_graph.add_edges_from(canonical)
        if not nx.is_connected(nx_graph):
            components = nx.number_connected_components(nx_graph)
            raise GraphValidationError(
                f"Graph is disconnected ({components} connected components)"
            )

        neighbors: List[List[int]] = [[] for _ in range(node_count)]
        incident: List[List[int]] = [[] for _ in range(node_count)]
        for idx, (u, v) in enumerate(canonical):
            neighbors[u].append(v)
            neighbors[v].append(u)
            incident[u].append(idx)
            incident[v].append(idx)

        edge_adjacency = []
        for idx, (u, v) in enumerate(canonical):
            shared = (set(incident[u]) | set(incident[v])) - {idx}
            edge_adjacency.append(tuple(sorted(shared)))

        return cls(
            node_count=node_count,
            edges=tuple(canonical),
            node_adjacency=tuple(tuple(sorted(n)) for n in neighbors),
            edge_adjacency=tuple(edge_adjacency),
            edge_index=edge_index,
        )

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, node: int) -> Tuple[int, ...]:
        return self.node_adjacency[node]

    def edge_id(self, u: int, v: int) -> int:
        """Resolve an endpoint pair in either orientation to its edge id."""
        key = (min(u, v), max(u, v))
        try:
            return self.edge_index[key]
        except KeyError:
            raise GraphValidationError(f"Edge {[u, v]} is not in the graph") from None

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edge_index

    @cached_property
    def distances(self) -> np.ndarray:
        """All-pairs hop distance matrix, read-only."""
        nx_graph = nx.Graph()
        nx_graph.add_nodes_from(range(self.node_count))
        nx_graph.add_edges_from(self.edges)
        matrix = np.zeros((self.node_count, self.node_count), dtype=np.int64)
        for source, lengths in nx.all_pairs_shortest_path_length(nx_graph):
            for target, length in lengths.items():
                matrix[source, target] = length
        matrix.setflags(write=False)
        return matrix

    def hop_distance(self, u: int, v: int) -> int:
        return int(self.distances[u, v])

    def edge_distance(self, node: int, edge: int) -> int:
        """Hops from a node to the nearer endpoint of an edge."""
        u, v = self.edges[edge]
        return int(min(self.distances[node, u], self.distances[node, v]))


def hop_distance(g: Graph, u: int, v: int) -> int:
    return g.hop_distance(u, v)


def canonical_shortest_path(g: Graph, s: int, t: int) -> List[int]:
    """Hop-shortest path from s to t.

    Breadth-first search expands neighbors in ascending id order and keeps
    the first parent that discovers a node, so among equal-length paths the
    one through lower-index neighbors wins.
    """
    if s == t:
        return [s]
    parent = {s: s}
    queue = deque([s])
    while queue:
        node = queue.popleft()
        for nxt in g.node_adjacency[node]:
            if nxt in parent:
                continue
            parent[nxt] = node
            if nxt == t:
                queue.clear()
                break
            queue.append(nxt)

    path = [t]
    while path[-1] != s:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def generate_random_graph(n: int, ratio: float, seed: int) -> Graph:
    """Random connected simple graph with min(ceil(ratio*n), n(n-1)/2) edges.

    A uniformly random spanning tree (random permutation with random
    attachment) guarantees connectivity; the remaining edges are drawn
    uniformly without replacement from the non-tree pairs.
    """
    if n < 2:
        raise GraphValidationError(f"Random graphs need at least 2 nodes, got {n}")
    max_edges = n * (n - 1) // 2
    # Rounding first keeps 1.2 * 5 from landing on 6.000000000000001
    target = min(math.ceil(round(ratio * n, 9)), max_edges)
    if target < n - 1:
        raise GraphValidationError(
            f"Ratio {ratio} gives {target} edges, "
            f"fewer than the {n - 1} of a spanning tree"
        )

    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    edges: List[Edge] = []
    for i in range(1, n):
        parent = int(perm[rng.integers(0, i)])
        child = int(perm[i])
        edges.append((min(parent, child), max(parent, child)))

    extra = target - len(edges)
    if extra > 0:
        tree = set(edges)
        candidates = [
            (u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in tree
        ]
        picks = rng.choice(len(candidates), size=extra, replace=False)
        edges.extend(candidates[int(i)] for i in picks)

    return Graph.from_edges(n, edges)


def graph_to_document(g: Graph) -> Dict[str, Any]:
    return {"nodes": g.node_count, "edges": [[u, v] for u, v in g.edges]}


def graph_from_document(document: Any) -> Graph:
    if not isinstance(document, dict):
        raise GraphValidationError("Graph document must be a JSON object")
    unknown = set(document) - {"nodes", "edges"}
    if unknown:
        raise GraphValidationError(f"Unknown graph fields: {sorted(unknown)}")
    if "nodes" not in document or "edges" not in document:
        raise GraphValidationError("Graph document needs 'nodes' and 'edges'")
    edges = document["edges"]
    if not isinstance(edges, list) or not all(isinstance(e, list) for e in edges):
        raise GraphValidationError("'edges' must be a list of [u, v] pairs")
    return Graph.from_edges(document["nodes"], edges)


def parse_graph(text: str) -> Graph:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphValidationError(f"Malformed graph JSON: {e}") from e
    return graph_from_document(document)


def serialize_graph(g: Graph) -> str:
    return json.dumps(graph_to_document(g), indent=2) + "\n"
