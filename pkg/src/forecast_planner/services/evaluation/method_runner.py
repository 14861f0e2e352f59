import time
from dataclasses import dataclass, replace
from typing import Optional

from injector import inject

from forecast_planner.models.result_models import RunResult
from forecast_planner.utils.constants import DEFAULT_MC_TRIALS, Allocator, Method
from forecast_planner.utils.evaluation.methods import MethodSpec
from forecast_planner.utils.evaluation.monte_carlo import (
    MonteCarloSummary,
    monte_carlo_eval,
)
from forecast_planner.utils.evaluation.scenario import Scenario
from forecast_planner.utils.forecast.adversary_forecast import (
    RiskForecast,
    build_transition_matrix,
    forecast,
)
from forecast_planner.utils.log_handlers import CliLogger
from forecast_planner.utils.planner.joint_planner import (
    PlanOutcome,
    make_problem,
    solve_lazy_astar,
)
from forecast_planner.utils.seeding import derive_seed
from forecast_planner.utils.support.support_alloc import (
    SupportMap,
    allocate,
    allocate_baseline,
)


@dataclass(frozen=True)
class MethodRun:
    """Everything one method produced on one scenario."""

    spec: MethodSpec
    result: RunResult
    outcome: PlanOutcome
    support_map: SupportMap
    risk_forecast: RiskForecast
    monte_carlo: Optional[MonteCarloSummary] = None


def allocation_seed(scenario: Scenario) -> int:
    return derive_seed(scenario.seed, "random-allocation")


def monte_carlo_seed(scenario: Scenario) -> int:
    # Shared by all methods so they face the same sampled adversaries
    return derive_seed(scenario.seed, "monte-carlo")


def run_method(
    scenario: Scenario,
    spec: MethodSpec,
    timeout_s: Optional[float] = None,
    trials: int = DEFAULT_MC_TRIALS,
) -> MethodRun:
    """Forecast, allocate, plan and evaluate one method.

    ``runtime_ms`` covers forecasting, allocation and planning; Monte Carlo
    evaluation is excluded.
    """
    g = scenario.graph
    started = time.monotonic()

    if spec.method == Method.NO_RISK:
        planning_forecast = RiskForecast.risk_free(scenario.horizon, g.edge_count)
        support_map = SupportMap.empty()
    else:
        planning_forecast = forecast(g, scenario.adversaries, scenario.horizon)
        support_config = scenario.support
        if spec.variant is not None:
            support_config = replace(support_config, variant=spec.variant)
        if spec.allocator == Allocator.FORECAST_AWARE:
            support_map = allocate(g, planning_forecast, scenario.tasks, support_config)
        else:
            support_map = allocate_baseline(
                g,
                planning_forecast,
                support_config,
                spec.allocator,
                tasks=scenario.tasks,
                seed=allocation_seed(scenario),
            )

    problem = make_problem(
        g,
        planning_forecast,
        support_map,
        scenario.tasks,
        scenario.params,
        scenario.horizon,
    )
    outcome = solve_lazy_astar(problem, timeout_s=timeout_s)
    runtime_ms = int(round((time.monotonic() - started) * 1000))

    if not outcome.solved or outcome.plan is None:
        result = RunResult(
            method=spec.label,
            status=outcome.status,
            runtime_ms=runtime_ms,
            supports=len(support_map),
            expansions=outcome.expansions,
        )
        return MethodRun(spec, result, outcome, support_map, planning_forecast)

    plan = outcome.plan
    summary = monte_carlo_eval(
        plan,
        scenario.adversaries,
        build_transition_matrix(g, scenario.adversaries.stay_prob),
        scenario.horizon,
        trials,
        monte_carlo_seed(scenario),
        g,
        scenario.tasks,
        scenario.params,
    )
    result = RunResult(
        method=spec.label,
        status=outcome.status,
        j_exp=plan.j_exp,
        j_real_mean=summary.mean,
        j_real_se=summary.se,
        delta=summary.mean - plan.j_exp,
        runtime_ms=runtime_ms,
        makespan=plan.makespan,
        supports=len(support_map),
        expansions=outcome.expansions,
    )
    return MethodRun(spec, result, outcome, support_map, planning_forecast, summary)


class MethodRunner:
    """Runs planning methods on scenarios and logs each pipeline stage."""

    @inject
    def __init__(self, logger: CliLogger) -> None:
        self.logger = logger

    def run(
        self,
        scenario: Scenario,
        spec: MethodSpec,
        timeout_s: Optional[float] = None,
        trials: int = DEFAULT_MC_TRIALS,
    ) -> MethodRun:
        self.logger.info(
            f"Running {spec.label} on {scenario.graph.node_count} nodes, "
            f"{len(scenario.tasks)} robots, {scenario.adversaries.count} adversaries, "
            f"T={scenario.horizon}"
        )
        run = run_method(scenario, spec, timeout_s=timeout_s, trials=trials)
        self.logger.debug(
            f"{spec.label}: {len(run.support_map)} edges with support, "
            f"peak risk {float(run.risk_forecast.risk.max(initial=0.0)):.4f}"
        )
        self.logger.info(
            f"{spec.label}: {run.outcome.status.value} after "
            f"{run.outcome.expansions} expansions in {run.outcome.elapsed_s:.3f}s"
        )
        if run.monte_carlo is not None:
            self.logger.info(
                f"{spec.label}: j_exp={run.result.j_exp:.4f} "
                f"j_real={run.monte_carlo.mean:.4f}±{run.monte_carlo.se:.4f} "
                f"over {run.monte_carlo.trials} trials"
            )
        return run
