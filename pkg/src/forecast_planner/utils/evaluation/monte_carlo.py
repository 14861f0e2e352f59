"""Realized-cost replay, Monte Carlo estimates and summary statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from forecast_planner.exceptions import ValidationError
from forecast_planner.utils.forecast.adversary_forecast import (
    AdversaryModel,
    AdversaryTrajectory,
    TransitionMatrix,
    sample_trajectories,
)
from forecast_planner.utils.graph_core import Graph
from forecast_planner.utils.planner.joint_planner import CostParams, Plan, replay_cost
from forecast_planner.utils.seeding import derive_seed
from forecast_planner.utils.task_models import RobotTask


@dataclass(frozen=True)
class MonteCarloSummary:
    mean: float
    se: float
    costs: Tuple[float, ...]

    @property
    def trials(self) -> int:
        return len(self.costs)


def realized_cost(
    plan: Plan,
    trajectories: AdversaryTrajectory,
    g: Graph,
    tasks: Sequence[RobotTask],
    params: CostParams,
) -> float:
    """Cost of the fixed plan when adversaries follow the sampled trajectories."""

    def occupancy(edge: int, t: int) -> float:
        return 1.0 if edge in trajectories.occupied(t) else 0.0

    return replay_cost(plan, g, tasks, params, occupancy)


def mean_and_se(values: Sequence[float]) -> Tuple[float, float]:
    """Mean and standard error (sample std / sqrt n); se is 0 for n <= 1."""
    n = len(values)
    if n == 0:
        return math.nan, math.nan
    mean = math.fsum(values) / n
    if n == 1 or max(values) == min(values):
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / math.sqrt(n))


def monte_carlo_eval(
    plan: Plan,
    model: AdversaryModel,
    theta: TransitionMatrix,
    horizon: int,
    n_trials: int,
    master_seed: int,
    g: Graph,
    tasks: Sequence[RobotTask],
    params: CostParams,
) -> MonteCarloSummary:
    """Replay a plan against n_trials sampled adversary runs.

    Trial i samples with ``derive_seed(master_seed, i)``, so any subset of
    trials can be reproduced independently.
    """
    if n_trials < 1:
        raise ValidationError(f"Monte Carlo trials must be >= 1, got {n_trials}")

    costs = []
    for trial in range(n_trials):
        trajectories = sample_trajectories(
            model, theta, horizon, derive_seed(master_seed, trial)
        )
        costs.append(realized_cost(plan, trajectories, g, tasks, params))

    mean, se = mean_and_se(costs)
    return MonteCarloSummary(mean=mean, se=se, costs=tuple(costs))


def pooled_se(standard_errors: Sequence[float]) -> float:
    """Standard error of a mean of independent estimates."""
    if not standard_errors:
        return 0.0
    squares = math.fsum(se * se for se in standard_errors)
    return math.sqrt(squares) / len(standard_errors)
