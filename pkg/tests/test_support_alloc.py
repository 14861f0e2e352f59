import numpy as np
import pytest

from forecast_planner.exceptions import ValidationError
from forecast_planner.utils.constants import Allocator, ScoringVariant
from forecast_planner.utils.forecast.adversary_forecast import (
    AdversaryModel,
    RiskForecast,
    forecast,
)
from forecast_planner.utils.graph_core import generate_random_graph
from forecast_planner.utils.support.support_alloc import (
    SupportConfig,
    SupportMap,
    allocate,
    allocate_baseline,
    candidate_nodes,
    coverage_set,
    path_overlap,
    risky_edge_set,
    score_candidates,
    top_nodes,
)
from forecast_planner.utils.task_models import RobotTask

RELAY_TASKS = (RobotTask(1, 3), RobotTask(2, 0))


class TestSupportConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [{"k": -1}, {"s": 0}, {"alpha": 0.0}, {"beta": -1.0}, {"coverage_radius": -2}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            SupportConfig(**kwargs)

    def test_radius_defaults_to_k(self):
        assert SupportConfig(k=3).radius == 3
        assert SupportConfig(k=3, coverage_radius=1).radius == 1


class TestBuildingBlocks:
    def test_coverage_set(self, path_graph):
        assert coverage_set(path_graph, 0, SupportConfig(k=1)) == {0, 1}
        assert coverage_set(path_graph, 2, SupportConfig(k=0)) == {1, 2}

    def test_candidates_within_k_hops(self, path_graph):
        # Edge 3 = (3, 4)
        assert candidate_nodes(path_graph, 3, SupportConfig(k=1)) == [2, 3, 4]
        narrow = SupportConfig(k=2, coverage_radius=0)
        assert candidate_nodes(path_graph, 3, narrow) == [3, 4]

    def test_risky_edges(self, path_graph):
        static = forecast(path_graph, AdversaryModel(2, 1.0, (1, 3)), 5)
        assert risky_edge_set(static) == [1, 3]
        mobile = forecast(path_graph, AdversaryModel(1, 0.5, (0,)), 3)
        assert risky_edge_set(mobile) == [0, 1, 2, 3]
        assert risky_edge_set(RiskForecast.risk_free(3, 4)) == []

    def test_path_overlap(self, path_graph):
        counts, p_hat = path_overlap(path_graph, RELAY_TASKS)
        assert counts.tolist() == [1, 2, 2, 1, 0]
        np.testing.assert_allclose(p_hat, [0.5, 1.0, 1.0, 0.5, 0.0])

    def test_path_overlap_without_tasks(self, path_graph):
        counts, p_hat = path_overlap(path_graph, ())
        assert not counts.any() and not p_hat.any()

    def test_risk_potential_is_a_softmax(self, path_graph):
        risk_forecast = forecast(path_graph, AdversaryModel(1, 0.8, (1,)), 5)
        _, p_hat = path_overlap(path_graph, RELAY_TASKS)
        breakdowns = score_candidates(
            path_graph, 1, [0, 1, 2, 3], p_hat, risk_forecast, SupportConfig()
        )
        assert sum(b.r_hat for b in breakdowns) == pytest.approx(1.0)
        # Endpoints of the edge are nearest and get the largest share
        by_node = {b.node: b for b in breakdowns}
        assert by_node[1].r_hat == by_node[2].r_hat > by_node[0].r_hat

    def test_score_needs_candidates(self, path_graph):
        with pytest.raises(ValidationError):
            score_candidates(
                path_graph,
                0,
                [],
                np.zeros(5),
                RiskForecast.risk_free(2, 4),
                SupportConfig(),
            )

    @pytest.mark.parametrize(
        "variant, best",
        [
            (ScoringVariant.RISK_PATH, 1),
            (ScoringVariant.PATH_ONLY, 1),
            (ScoringVariant.RISK_ONLY, 1),
            (ScoringVariant.DETOUR_ONLY, 1),
        ],
    )
    def test_variants_pick_a_covering_node(self, path_graph, variant, best):
        risk_forecast = forecast(path_graph, AdversaryModel(1, 0.8, (1,)), 5)
        _, p_hat = path_overlap(path_graph, RELAY_TASKS)
        config = SupportConfig(variant=variant)
        candidates = candidate_nodes(path_graph, 1, config)
        ranked = top_nodes(
            score_candidates(path_graph, 1, candidates, p_hat, risk_forecast, config),
            1,
        )
        assert ranked[0].node == best

    def test_top_nodes_breaks_ties_by_node(self, path_graph):
        risk_forecast = RiskForecast.risk_free(2, 4)
        config = SupportConfig(variant=ScoringVariant.PATH_ONLY, s=2)
        breakdowns = score_candidates(
            path_graph, 1, [3, 0, 2], np.zeros(5), risk_forecast, config
        )
        assert [b.node for b in top_nodes(breakdowns, 2)] == [0, 2]


class TestAllocate:
    def test_every_risky_edge_gets_up_to_s_candidates(self):
        g = generate_random_graph(10, 1.6, seed=5)
        risk_forecast = forecast(g, AdversaryModel(3, 0.5, (0, 5, 10)), 20)
        tasks = (RobotTask(0, 9), RobotTask(4, 2))
        config = SupportConfig(k=2, s=2)
        support_map = allocate(g, risk_forecast, tasks, config)
        for edge in risky_edge_set(risk_forecast):
            nodes = support_map.nodes_for(edge)
            assert 1 <= len(nodes) <= 2
            assert len(set(nodes)) == len(nodes)
            assert all(g.edge_distance(x, edge) <= 2 for x in nodes)
        assert set(support_map.assignments) <= set(risky_edge_set(risk_forecast))

    def test_relay_allocation(self, path_graph):
        risk_forecast = forecast(path_graph, AdversaryModel(2, 0.8, (1, 3)), 5)
        support_map = allocate(path_graph, risk_forecast, RELAY_TASKS, SupportConfig())
        assert set(support_map.assignments) == {0, 1, 2, 3}
        assert support_map.allows(1, 1)
        assert 1 in support_map.edges_supported_from(1)

    def test_no_risk_no_support(self, path_graph):
        support_map = allocate(
            path_graph, RiskForecast.risk_free(5, 4), RELAY_TASKS, SupportConfig()
        )
        assert len(support_map) == 0

    def test_static_case_tcgre_matches_forecast_aware(self):
        for seed in range(10):
            g = generate_random_graph(10, 1.6, seed=seed)
            model = AdversaryModel(4, 1.0, (0, 3, 6, 9))
            risk_forecast = forecast(g, model, 20)
            tasks = (RobotTask(0, 5), RobotTask(7, 2))
            config = SupportConfig()
            tcgre = allocate_baseline(
                g, risk_forecast, config, Allocator.TCGRE, tasks=tasks
            )
            assert tcgre == allocate(g, risk_forecast, tasks, config)

    def test_tcgre_only_covers_initially_risky_edges(self, path_graph):
        risk_forecast = forecast(path_graph, AdversaryModel(1, 0.5, (0,)), 4)
        tcgre = allocate_baseline(
            path_graph, risk_forecast, SupportConfig(), Allocator.TCGRE, RELAY_TASKS
        )
        assert set(tcgre.assignments) == {0}

    def test_none_allocator(self, path_graph):
        risk_forecast = forecast(path_graph, AdversaryModel(1, 0.5, (0,)), 4)
        empty = allocate_baseline(
            path_graph, risk_forecast, SupportConfig(), Allocator.NONE
        )
        assert empty == SupportMap.empty()

    def test_random_allocator(self):
        g = generate_random_graph(10, 1.6, seed=8)
        risk_forecast = forecast(g, AdversaryModel(2, 0.5, (1, 2)), 20)
        config = SupportConfig(s=2)
        first = allocate_baseline(g, risk_forecast, config, Allocator.RANDOM, seed=4)
        again = allocate_baseline(g, risk_forecast, config, Allocator.RANDOM, seed=4)
        assert first == again
        for edge, nodes in first.assignments.items():
            assert set(nodes) <= set(candidate_nodes(g, edge, config))
            assert len(nodes) == min(2, len(candidate_nodes(g, edge, config)))

    def test_random_allocator_needs_seed(self, path_graph):
        risk_forecast = forecast(path_graph, AdversaryModel(1, 0.5, (0,)), 4)
        with pytest.raises(ValidationError):
            allocate_baseline(
                path_graph, risk_forecast, SupportConfig(), Allocator.RANDOM
            )

    def test_support_map_documents(self, path_graph):
        support_map = SupportMap(assignments={2: (3,), 0: (1, 0)}, scores={2: (0.5,)})
        assert support_map.to_documents(path_graph) == [
            {"edge": [0, 1], "nodes": [1, 0], "scores": []},
            {"edge": [2, 3], "nodes": [3], "scores": [0.5]},
        ]
        assert support_map.includes(SupportMap(assignments={0: (1,)}))
        assert not support_map.includes(SupportMap(assignments={1: (1,)}))


class TestInvariance:
    @pytest.fixture
    def instance(self):
        g = generate_random_graph(12, 1.6, seed=3)
        risk_forecast = forecast(g, AdversaryModel(3, 0.6, (0, 4, 9)), 24)
        tasks = (RobotTask(0, 11), RobotTask(5, 2), RobotTask(8, 1))
        return g, risk_forecast, tasks

    @staticmethod
    def perturbed(risk_forecast, seed=0):
        """Same risky edges, different risk values."""
        rng = np.random.default_rng(seed)
        factor = rng.uniform(1.0, 2.0, size=risk_forecast.risk.shape)
        return RiskForecast(
            horizon=risk_forecast.horizon,
            marginals=risk_forecast.marginals,
            risk=np.minimum(risk_forecast.risk * factor, 1.0),
        )

    @pytest.mark.parametrize("variant", list(ScoringVariant))
    def test_candidate_order_does_not_matter(self, instance, variant):
        g, risk_forecast, tasks = instance
        config = SupportConfig(s=2, variant=variant)
        _, p_hat = path_overlap(g, tasks)
        for edge in risky_edge_set(risk_forecast):
            candidates = candidate_nodes(g, edge, config)
            picks = [
                [
                    b.node
                    for b in top_nodes(
                        score_candidates(
                            g, edge, order, p_hat, risk_forecast, config
                        ),
                        config.s,
                    )
                ]
                for order in (candidates, candidates[::-1])
            ]
            assert picks[0] == picks[1]

    @pytest.mark.parametrize("variant", list(ScoringVariant))
    def test_task_order_does_not_matter(self, instance, variant):
        g, risk_forecast, tasks = instance
        config = SupportConfig(variant=variant)
        assert allocate(g, risk_forecast, tasks, config) == allocate(
            g, risk_forecast, tasks[::-1], config
        )

    def test_path_only_ignores_risk_values(self, instance):
        g, risk_forecast, tasks = instance
        config = SupportConfig(s=2, variant=ScoringVariant.PATH_ONLY)
        noisy = self.perturbed(risk_forecast)
        assert risky_edge_set(noisy) == risky_edge_set(risk_forecast)
        original = allocate(g, risk_forecast, tasks, config)
        assert allocate(g, noisy, tasks, config).assignments == original.assignments

    @pytest.mark.parametrize(
        "variant", [ScoringVariant.RISK_ONLY, ScoringVariant.DETOUR_ONLY]
    )
    def test_risk_and_detour_scores_ignore_tasks(self, instance, variant):
        g, risk_forecast, tasks = instance
        config = SupportConfig(s=2, variant=variant)
        other_tasks = (RobotTask(11, 0), RobotTask(3, 7))
        original = allocate(g, risk_forecast, tasks, config)
        moved = allocate(g, risk_forecast, other_tasks, config)
        assert moved.assignments == original.assignments
