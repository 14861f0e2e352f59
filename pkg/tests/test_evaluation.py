import math

import numpy as np
import pytest

from forecast_planner.exceptions import ValidationError
from forecast_planner.models.result_models import SuiteRow
from forecast_planner.services.evaluation.method_runner import (
    MethodRunner,
    monte_carlo_seed,
    run_method,
)
from forecast_planner.utils.constants import (
    DEFAULT_CALIBRATION_BOUND,
    DEFAULT_CALIBRATION_SIGMAS,
    Method,
    PlanStatus,
    ScoringVariant,
    TaskMode,
)
from forecast_planner.utils.evaluation.aggregation import (
    aggregate_cells,
    calibration_report,
    plot_data,
)
from forecast_planner.utils.evaluation.methods import MethodSpec
from forecast_planner.utils.evaluation.monte_carlo import (
    mean_and_se,
    monte_carlo_eval,
    pooled_se,
    realized_cost,
)
from forecast_planner.utils.evaluation.scenario import generate_scenario
from forecast_planner.utils.forecast.adversary_forecast import (
    AdversaryModel,
    AdversaryTrajectory,
    build_transition_matrix,
    forecast,
)
from forecast_planner.utils.graph_core import Graph, generate_random_graph
from forecast_planner.utils.planner.joint_planner import CostParams, plan_lazy_astar
from forecast_planner.utils.seeding import derive_seed
from forecast_planner.utils.support.support_alloc import SupportMap
from forecast_planner.utils.task_models import RobotTask


@pytest.fixture
def static_case():
    """Robot 0 -> 2 on a 3-node path with a parked adversary on (1, 2)."""
    g = Graph.from_edges(3, [[0, 1], [1, 2]])
    model = AdversaryModel(1, 1.0, (1,))
    tasks = [RobotTask(0, 2)]
    plan = plan_lazy_astar(
        g, forecast(g, model, 6), SupportMap(), tasks, CostParams(), 6
    ).plan
    return g, model, tasks, plan


def make_row(method="forecast_aware:risk_path", status=PlanStatus.SOLVED, **values):
    defaults = dict(
        method=method,
        graph_size=10,
        ratio=1.6,
        n_robots=2,
        n_adversaries=4,
        stay=0.5,
        instance=0,
        seed=0,
        status=status,
    )
    if status == PlanStatus.SOLVED:
        defaults.update(j_exp=10.0, j_real_mean=10.0, j_real_se=0.1, delta=0.0)
    defaults.update(values)
    return SuiteRow(**defaults)


class TestStatistics:
    def test_mean_and_se(self):
        mean, se = mean_and_se([1.0, 2.0, 3.0])
        assert mean == 2.0
        assert se == pytest.approx(1 / math.sqrt(3))

    @pytest.mark.parametrize("values", [[4.0], [2.5, 2.5, 2.5]])
    def test_zero_se(self, values):
        assert mean_and_se(values)[1] == 0.0

    def test_empty_sample(self):
        mean, se = mean_and_se([])
        assert math.isnan(mean) and math.isnan(se)

    def test_pooled_se(self):
        assert pooled_se([3.0, 4.0]) == 2.5
        assert pooled_se([]) == 0.0


class TestRealizedCost:
    def test_parked_adversary(self, static_case):
        g, _, tasks, plan = static_case
        parked = AdversaryTrajectory(edges=np.full((1, 7), 1))
        assert realized_cost(plan, parked, g, tasks, CostParams()) == 12.0

    def test_adversary_that_leaves_in_time(self, static_case):
        g, _, tasks, plan = static_case
        # On (1, 2) at t=0 only; the robot crosses (0, 1) then (1, 2) at t=1
        moving = AdversaryTrajectory(edges=np.array([[1, 0, 0, 0, 0, 0, 0]]))
        assert realized_cost(plan, moving, g, tasks, CostParams()) == 2.0

    def test_no_adversaries(self, static_case):
        g, _, tasks, plan = static_case
        empty = AdversaryTrajectory(edges=np.zeros((0, 7), dtype=int))
        assert realized_cost(plan, empty, g, tasks, CostParams()) == 2.0


class TestMonteCarlo:
    def test_static_adversary_has_no_spread(self, static_case):
        g, model, tasks, plan = static_case
        summary = monte_carlo_eval(
            plan,
            model,
            build_transition_matrix(g, 1.0),
            6,
            40,
            7,
            g,
            tasks,
            CostParams(),
        )
        assert summary.trials == 40
        assert summary.mean == 12.0
        assert summary.se == 0.0

    def test_trials_are_independently_seeded(self, golden_scenario):
        run = run_method(golden_scenario, MethodSpec(Method.NO_SUPPORT), trials=5)
        g = golden_scenario.graph
        shorter = monte_carlo_eval(
            run.outcome.plan,
            golden_scenario.adversaries,
            build_transition_matrix(g, golden_scenario.adversaries.stay_prob),
            golden_scenario.horizon,
            3,
            monte_carlo_seed(golden_scenario),
            g,
            golden_scenario.tasks,
            golden_scenario.params,
        )
        assert shorter.costs == run.monte_carlo.costs[:3]

    def test_rejects_zero_trials(self, static_case):
        g, model, tasks, plan = static_case
        with pytest.raises(ValidationError):
            monte_carlo_eval(
                plan,
                model,
                build_transition_matrix(g, 1.0),
                6,
                0,
                0,
                g,
                tasks,
                CostParams(),
            )


CALIBRATION_CELLS = [
    pytest.param(
        robots, adversaries, stay, marks=pytest.mark.slow if robots > 2 else ()
    )
    for robots in (2, 3)
    for adversaries in (2, 4)
    for stay in (0.2, 0.5, 0.8)
]


class TestCalibration:
    @pytest.mark.parametrize("robots, adversaries, stay", CALIBRATION_CELLS)
    def test_realized_mean_tracks_expected_cost(self, robots, adversaries, stay):
        g = generate_random_graph(10, 1.6, seed=0)
        scenario = generate_scenario(g, robots, adversaries, stay, TaskMode.DSDG, 0)
        run = run_method(
            scenario, MethodSpec(Method.FORECAST_AWARE), timeout_s=90, trials=500
        )
        assert run.outcome.solved
        result = run.result
        bound = max(
            DEFAULT_CALIBRATION_BOUND, DEFAULT_CALIBRATION_SIGMAS * result.j_real_se
        )
        assert abs(result.j_real_mean - result.j_exp) <= bound
        assert result.delta == pytest.approx(result.j_real_mean - result.j_exp)


class TestMethodSpec:
    @pytest.mark.parametrize(
        "text, method, variant, label",
        [
            ("none", Method.NO_SUPPORT, None, "no_support"),
            ("no_support", Method.NO_SUPPORT, None, "no_support"),
            (" No_Risk ", Method.NO_RISK, None, "no_risk"),
            ("tcgre", Method.TCGRE, None, "tcgre"),
            (
                "forecast_aware",
                Method.FORECAST_AWARE,
                ScoringVariant.RISK_PATH,
                "forecast_aware:risk_path",
            ),
            (
                "forecast_aware:detour_only",
                Method.FORECAST_AWARE,
                ScoringVariant.DETOUR_ONLY,
                "forecast_aware:detour_only",
            ),
        ],
    )
    def test_parse(self, text, method, variant, label):
        spec = MethodSpec.parse(text)
        assert spec.method == method
        assert spec.variant == variant
        assert spec.label == label

    def test_default_variant_only_applies_to_forecast_aware(self):
        assert (
            MethodSpec.parse("forecast_aware", ScoringVariant.RISK_ONLY).variant
            == ScoringVariant.RISK_ONLY
        )
        assert MethodSpec.parse("random", ScoringVariant.RISK_ONLY).variant is None

    @pytest.mark.parametrize(
        "text", ["bogus", "tcgre:risk_only", "forecast_aware:bogus"]
    )
    def test_parse_errors(self, text):
        with pytest.raises(ValidationError):
            MethodSpec.parse(text)


class TestSeeding:
    def test_derive_seed(self):
        seed = derive_seed(0, "monte-carlo")
        assert seed == derive_seed(0, "monte-carlo")
        assert seed != derive_seed(1, "monte-carlo")
        assert seed != derive_seed(0, "random-allocation")
        assert 0 <= seed < 2**63


class TestAggregation:
    def test_failures_only_count_toward_the_failure_rate(self):
        rows = [
            make_row(instance=0, j_exp=10.0),
            make_row(instance=1, j_exp=14.0),
            make_row(instance=2, status=PlanStatus.TIMEOUT, runtime_ms=90000),
        ]
        cells = aggregate_cells(rows)
        assert len(cells) == 1
        summary = next(iter(cells.values()))
        assert summary.runs == 3
        assert summary.solved == 2
        assert summary.failure_rate == pytest.approx(1 / 3)
        assert summary.j_exp_mean == 12.0
        assert summary.j_exp_se == pytest.approx(2.0)

    def test_cell_without_solved_runs(self):
        cells = aggregate_cells([make_row(status=PlanStatus.INFEASIBLE)])
        summary = next(iter(cells.values()))
        assert summary.j_exp_mean is None
        assert summary.failure_rate == 1.0

    def test_plot_series_sorted_by_stay(self):
        rows = [
            make_row(stay=1.0, j_exp=20.0),
            make_row(stay=0.2, j_exp=8.0),
            make_row(method="no_support", stay=0.2, j_exp=9.0),
        ]
        data = plot_data(aggregate_cells(rows))
        assert [s.method for s in data.series] == [
            "forecast_aware:risk_path",
            "no_support",
        ]
        assert data.series[0].x == [0.2, 1.0]
        assert data.series[0].y == [8.0, 20.0]

    def test_csv_row_restores_the_row(self):
        row = make_row(makespan=7, runtime_ms=12)
        assert SuiteRow.from_csv_row(row.to_csv_row()) == row


class TestCalibrationReport:
    def test_within_bounds(self):
        rows = [
            make_row(seed=s, delta=d, j_real_se=0.2) for s, d in enumerate([0.4, -0.2])
        ]
        report = calibration_report(rows, "forecast_aware:risk_path", 1.0, 4.0)
        assert report.within_bounds
        assert report.cells[0].runs == 2
        assert report.cells[0].delta == pytest.approx(0.1)

    def test_large_bias_is_flagged(self):
        rows = [make_row(seed=s, delta=3.0, j_real_se=0.1) for s in range(3)]
        report = calibration_report(rows, "forecast_aware:risk_path", 1.0, 4.0)
        cell = report.cells[0]
        assert cell.exceeds_bound and cell.exceeds_sigma_bound
        assert not report.within_bounds

    def test_noisy_cell_passes_on_the_sigma_bound(self):
        rows = [make_row(seed=s, delta=2.0, j_real_se=1.0) for s in range(2)]
        report = calibration_report(rows, "forecast_aware:risk_path", 1.0, 4.0)
        assert report.cells[0].exceeds_bound
        assert not report.cells[0].exceeds_sigma_bound
        assert report.within_bounds

    def test_other_methods_and_failures_ignored(self):
        rows = [
            make_row(method="no_support"),
            make_row(status=PlanStatus.TIMEOUT),
        ]
        report = calibration_report(rows, "forecast_aware:risk_path", 1.0, 4.0)
        assert report.cells == []


class TestRunMethod:
    def test_method_ordering_on_golden_scenario(self, golden_scenario):
        results = {
            method: run_method(golden_scenario, MethodSpec.parse(method), trials=50)
            for method in ("no_risk", "no_support", "forecast_aware")
        }
        for run in results.values():
            assert run.result.status == PlanStatus.SOLVED
        assert (
            results["no_risk"].result.j_exp
            <= results["forecast_aware"].result.j_exp
            <= results["no_support"].result.j_exp
        )
        assert len(results["no_support"].support_map) == 0
        assert results["forecast_aware"].result.supports > 0

    def test_deterministic(self, golden_scenario, logger):
        runner = MethodRunner(logger=logger)
        first = runner.run(golden_scenario, MethodSpec.parse("random"), trials=30)
        second = runner.run(golden_scenario, MethodSpec.parse("random"), trials=30)
        assert first.support_map == second.support_map
        assert first.result.j_exp == second.result.j_exp
        assert first.monte_carlo.costs == second.monte_carlo.costs
        assert first.result.delta == pytest.approx(
            first.result.j_real_mean - first.result.j_exp
        )

    def test_timeout_result_has_no_costs(self, golden_scenario):
        run = run_method(golden_scenario, MethodSpec.parse("tcgre"), timeout_s=1e-9)
        assert run.result.status == PlanStatus.TIMEOUT
        assert run.result.j_exp is None
        assert run.monte_carlo is None
