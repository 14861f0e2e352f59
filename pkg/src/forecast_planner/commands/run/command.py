import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import click
from injector import inject

from forecast_planner.core.command_base import CommandBase
from forecast_planner.core.decorators import argument, command, option
from forecast_planner.core.interactive.ui import ConsoleUI
from forecast_planner.models.result_models import RunReport
from forecast_planner.services.evaluation.method_runner import MethodRun, MethodRunner
from forecast_planner.services.scenario_service import ScenarioService
from forecast_planner.utils.constants import (
    ALLOCATOR_METHODS,
    DEFAULT_MC_TRIALS,
    DEFAULT_TIMEOUT_S,
    ExitCode,
    Method,
    PlanStatus,
    ScoringVariant,
)
from forecast_planner.utils.evaluation.methods import MethodSpec
from forecast_planner.utils.evaluation.scenario import Scenario
from forecast_planner.utils.log_handlers import CliLogger
from forecast_planner.utils.planner.plan_io import outcome_to_document
from forecast_planner.utils.validation.validator import (
    validate_timeout,
    validate_trials,
)

RunSummary = Tuple[Path, Scenario, List[MethodRun]]


def plan_path_for(plan_out: Path, spec: MethodSpec, several: bool) -> Path:
    if not several:
        return plan_out
    suffix = spec.label.replace(":", "-")
    return plan_out.with_name(f"{plan_out.stem}.{suffix}{plan_out.suffix or '.json'}")


@command("run")
class Run(CommandBase):
    """Forecast, allocate support, plan and evaluate one scenario.

    Exit code 0 when every method solved, 2 when one was infeasible and 3
    when one ran out of time.

    Examples:

    \b
        fcplan run scenario.json
        fcplan run scenario.json --method forecast_aware --method none
        fcplan run scenario.json --method forecast_aware:risk_only --plan-out p.json
    """

    @inject
    def __init__(
        self,
        scenario_service: ScenarioService,
        method_runner: MethodRunner,
        ui: ConsoleUI,
        logger: CliLogger,
    ) -> None:
        self.scenario_service = scenario_service
        self.method_runner = method_runner
        self.ui = ui
        self.logger = logger

    @argument(
        "scenario_path",
        type=click.Path(exists=True, dir_okay=False, path_type=Path),
    )
    @option(
        "--method",
        "-m",
        "methods",
        multiple=True,
        help="Method label, repeatable (default: the scenario's allocator)",
    )
    @option(
        "--variant",
        type=click.Choice([v.value for v in ScoringVariant]),
        help="Scoring variant for forecast_aware without an explicit one",
    )
    @option("--timeout-s", type=float, default=DEFAULT_TIMEOUT_S, show_default=True)
    @option("--trials", type=int, default=DEFAULT_MC_TRIALS, show_default=True)
    @option(
        "--out",
        type=click.Path(dir_okay=False, path_type=Path),
        help="Write the run result JSON here",
    )
    @option(
        "--plan-out",
        type=click.Path(dir_okay=False, path_type=Path),
        help="Write the plan JSON here (one file per method when several)",
    )
    def execute(
        self,
        scenario_path: Path,
        methods: Tuple[str, ...] = (),
        variant: Optional[str] = None,
        timeout_s: float = DEFAULT_TIMEOUT_S,
        trials: int = DEFAULT_MC_TRIALS,
        out: Optional[Path] = None,
        plan_out: Optional[Path] = None,
        **kwargs: Any,
    ) -> RunSummary:
        """Run each requested method on the scenario."""
        timeout_s = validate_timeout(timeout_s)
        trials = validate_trials(trials)

        scenario, scenario_file = self.scenario_service.load_scenario(scenario_path)
        default_variant = scenario.support.variant
        if variant:
            default_variant = ScoringVariant(variant)
        if methods:
            specs = [MethodSpec.parse(text, default_variant) for text in methods]
        else:
            method = ALLOCATOR_METHODS[scenario_file.support.allocator]
            specs = [MethodSpec.parse(method.value, default_variant)]
        specs = list(dict.fromkeys(specs))

        runs = [
            self.method_runner.run(scenario, spec, timeout_s=timeout_s, trials=trials)
            for spec in specs
        ]

        if out is not None:
            report = RunReport(
                scenario=str(scenario_path), results=[run.result for run in runs]
            )
            self._write_json(out, report.to_dict(encode_json=True))  # type: ignore
        if plan_out is not None:
            for run in runs:
                document = outcome_to_document(
                    run.outcome, scenario.graph, run.support_map, run.spec.label
                )
                path = plan_path_for(plan_out, run.spec, len(runs) > 1)
                payload = document.to_dict(encode_json=True)  # type: ignore
                self._write_json(path, payload)
        return scenario_path, scenario, runs

    def _write_json(self, path: Path, document: Dict[str, Any]) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
        self.logger.info(f"Wrote {path}")

    def output(self, result: RunSummary) -> None:
        scenario_path, scenario, runs = result
        baseline = next(
            (
                run.result.j_exp
                for run in runs
                if run.spec.method == Method.NO_SUPPORT and run.result.solved
            ),
            None,
        )
        rows = []
        for run in runs:
            r = run.result
            reduction = None
            if baseline and r.j_exp is not None:
                reduction = f"{100.0 * (baseline - r.j_exp) / baseline:.1f}%"
            rows.append(
                [
                    r.method,
                    r.status.value,
                    _fmt(r.j_exp),
                    _fmt_mc(r.j_real_mean, r.j_real_se),
                    _fmt(r.delta),
                    reduction,
                    r.makespan,
                    r.supports,
                    r.runtime_ms,
                ]
            )
        self.ui.display_table(
            f"Results for {scenario_path}",
            [
                "method",
                "status",
                "j_exp",
                "j_real",
                "delta",
                "vs no_support",
                "makespan",
                "supports",
                "runtime_ms",
            ],
            rows,
        )
        for run in runs:
            plan = run.outcome.plan
            if plan is None:
                continue
            g = scenario.graph
            narrative: Dict[str, Any] = {
                f"robot {i} ({task.start}->{task.goal})": ", ".join(
                    str(node) for node in plan.paths[i]
                )
                for i, task in enumerate(scenario.tasks)
            }
            narrative["support events"] = (
                "; ".join(
                    f"robot {e.supporter} at {e.node} covers {list(g.edges[e.edge])} "
                    f"at t={e.t}"
                    for e in plan.support_events
                )
                or "none"
            )
            self.ui.display_result(f"Plan {run.spec.label}", narrative)

    def exit_code(self, result: RunSummary) -> int:
        statuses = {run.result.status for run in result[2]}
        if PlanStatus.TIMEOUT in statuses:
            return int(ExitCode.TIMEOUT)
        if PlanStatus.INFEASIBLE in statuses:
            return int(ExitCode.INFEASIBLE)
        return int(ExitCode.OK)


def _fmt(value: Optional[float]) -> Optional[str]:
    return None if value is None else f"{value:.3f}"


def _fmt_mc(mean: Optional[float], se: Optional[float]) -> Optional[str]:
    if mean is None:
        return None
    return f"{mean:.3f} ± {se or 0.0:.3f}"
