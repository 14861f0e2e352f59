import json

import networkx as nx
import pytest

from forecast_planner.exceptions import GraphValidationError
from forecast_planner.utils.graph_core import (
    Graph,
    canonical_shortest_path,
    generate_random_graph,
    graph_to_document,
    hop_distance,
    parse_graph,
    serialize_graph,
)


def to_networkx(g: Graph) -> nx.Graph:
    nx_graph = nx.Graph()
    nx_graph.add_nodes_from(range(g.node_count))
    nx_graph.add_edges_from(g.edges)
    return nx_graph


class TestGraph:
    def test_edges_are_canonical_and_indexed_in_order(self):
        g = Graph.from_edges(3, [[1, 0], [2, 1]])
        assert g.edges == ((0, 1), (1, 2))
        assert g.edge_id(1, 0) == 0
        assert g.edge_id(2, 1) == 1
        assert g.has_edge(2, 1)
        assert not g.has_edge(0, 2)

    def test_edge_adjacency_shares_an_endpoint(self, path_graph):
        assert path_graph.edge_adjacency[0] == (1,)
        assert path_graph.edge_adjacency[1] == (0, 2)
        assert path_graph.neighbors(2) == (1, 3)

    def test_distances(self, path_graph):
        assert hop_distance(path_graph, 0, 4) == 4
        assert path_graph.hop_distance(3, 3) == 0
        # Edge (2, 3) seen from node 0: nearer endpoint is 2
        assert path_graph.edge_distance(0, 2) == 2
        assert path_graph.edge_distance(2, 2) == 0

    @pytest.mark.parametrize(
        "nodes, edges, message",
        [
            (3, [[0, 0], [0, 1], [1, 2]], "Self-loop"),
            (3, [[0, 1], [1, 0], [1, 2]], "Duplicate"),
            (3, [[0, 1], [1, 3]], "outside"),
            (4, [[0, 1], [2, 3]], "disconnected"),
            (0, [], "positive"),
            (3, [[0, 1, 2]], "two endpoints"),
        ],
    )
    def test_invalid_graphs(self, nodes, edges, message):
        with pytest.raises(GraphValidationError, match=message):
            Graph.from_edges(nodes, edges)

    def test_unknown_edge_lookup(self, path_graph):
        with pytest.raises(GraphValidationError):
            path_graph.edge_id(0, 4)


class TestCanonicalShortestPath:
    def test_lower_neighbor_wins_ties(self):
        cycle = Graph.from_edges(4, [[0, 1], [1, 2], [2, 3], [3, 0]])
        assert canonical_shortest_path(cycle, 0, 2) == [0, 1, 2]
        assert canonical_shortest_path(cycle, 2, 0) == [2, 1, 0]

    def test_trivial_path(self, path_graph):
        assert canonical_shortest_path(path_graph, 3, 3) == [3]

    def test_matches_hop_distance(self):
        g = generate_random_graph(12, 1.5, seed=4)
        for s in range(g.node_count):
            for t in range(g.node_count):
                path = canonical_shortest_path(g, s, t)
                assert len(path) - 1 == g.hop_distance(s, t)
                assert all(g.has_edge(a, b) for a, b in zip(path, path[1:]))


class TestGenerateRandomGraph:
    def test_edge_count_and_connectivity(self):
        g = generate_random_graph(10, 1.6, seed=1)
        assert g.edge_count == 16
        assert nx.is_connected(to_networkx(g))

    @pytest.mark.parametrize("n", [5, 10, 15, 20])
    @pytest.mark.parametrize("ratio", [1.2, 1.4, 1.6, 1.8])
    def test_grid_sizes(self, n, ratio):
        g = generate_random_graph(n, ratio, seed=7)
        expected = min(-(-round(ratio * n * 10) // 10), n * (n - 1) // 2)
        assert g.edge_count == expected
        assert nx.is_connected(to_networkx(g))

    def test_capped_at_complete_graph(self):
        assert generate_random_graph(4, 3.0, seed=0).edge_count == 6

    def test_deterministic_per_seed(self):
        assert generate_random_graph(10, 1.6, 3) == generate_random_graph(10, 1.6, 3)
        assert generate_random_graph(10, 1.6, 3) != generate_random_graph(10, 1.6, 4)

    def test_too_few_nodes(self):
        with pytest.raises(GraphValidationError):
            generate_random_graph(1, 1.6, seed=0)

    def test_ratio_below_spanning_tree(self):
        with pytest.raises(GraphValidationError, match="spanning tree"):
            generate_random_graph(10, 0.5, seed=0)


class TestGraphDocuments:
    def test_serialized_graph_reloads(self, path_graph):
        text = serialize_graph(path_graph)
        assert json.loads(text) == {
            "nodes": 5,
            "edges": [[0, 1], [1, 2], [2, 3], [3, 4]],
        }
        assert parse_graph(text) == path_graph

    def test_malformed_json(self):
        with pytest.raises(GraphValidationError, match="Malformed"):
            parse_graph("{not json")

    def test_unknown_field(self, path_graph):
        document = graph_to_document(path_graph)
        document["weights"] = []
        with pytest.raises(GraphValidationError, match="Unknown"):
            parse_graph(json.dumps(document))
