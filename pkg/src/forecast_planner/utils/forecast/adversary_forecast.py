"""Stay-move adversary dynamics on edges and the forecasts built from them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Sequence, Tuple

import numpy as np

from forecast_planner.exceptions import (
    EnumerationLimitError,
    ScenarioValidationError,
    ValidationError,
)
from forecast_planner.utils.constants import MAX_ENUMERATED_PATHS
from forecast_planner.utils.graph_core import Graph


@dataclass(frozen=True)
class AdversaryModel:
    """M adversaries on distinct initial edges sharing one stay probability."""

    count: int
    stay_prob: float
    initial_edges: Tuple[int, ...]

    def __post_init__(self) -> None:
        if self.count < 0:
            raise ScenarioValidationError(
                f"Adversary count must be non-negative, got {self.count}"
            )
        if not 0.0 <= self.stay_prob <= 1.0:
            raise ScenarioValidationError(
                f"Stay probability must be in [0, 1], got {self.stay_prob}"
            )
        if len(self.initial_edges) != self.count:
            raise ScenarioValidationError(
                f"Expected {self.count} initial edges, got {len(self.initial_edges)}"
            )
        if len(set(self.initial_edges)) != len(self.initial_edges):
            raise ScenarioValidationError("Two adversaries share an initial edge")

    def check_against(self, g: Graph) -> None:
        for edge in self.initial_edges:
            if not 0 <= edge < g.edge_count:
                raise ScenarioValidationError(
                    f"Initial edge {edge} outside [0, {g.edge_count})"
                )


@dataclass(frozen=True)
class TransitionMatrix:
    """Column-stochastic edge transition matrix.

    ``entries[e2, e1]`` is the probability of being on e2 at t+1 given e1
    at t.
    """

    entries: np.ndarray

    @property
    def edge_count(self) -> int:
        return int(self.entries.shape[0])

    def column(self, edge: int) -> np.ndarray:
        return self.entries[:, edge]


@dataclass(frozen=True)
class RiskForecast:
    """Per-adversary marginals q[j, t, e] and union risk rho[t, e] for t = 0..T."""

    horizon: int
    marginals: np.ndarray
    risk: np.ndarray

    @classmethod
    def risk_free(cls, horizon: int, edge_count: int) -> RiskForecast:
        marginals = np.zeros((0, horizon + 1, edge_count))
        risk = np.zeros((horizon + 1, edge_count))
        marginals.setflags(write=False)
        risk.setflags(write=False)
        return cls(horizon=horizon, marginals=marginals, risk=risk)

    @property
    def edge_count(self) -> int:
        return int(self.risk.shape[1])

    def edge_risk(self, t: int, edge: int) -> float:
        return float(self.risk[t, edge])


@dataclass(frozen=True)
class AdversaryTrajectory:
    """Sampled edge sequences, ``edges[j, t]`` for t = 0..T."""

    edges: np.ndarray

    @property
    def horizon(self) -> int:
        return int(self.edges.shape[1]) - 1

    def occupied(self, t: int) -> FrozenSet[int]:
        """Edges holding at least one adversary at time t."""
        if self.edges.shape[0] == 0:
            return frozenset()
        return frozenset(int(e) for e in self.edges[:, t])


def build_transition_matrix(g: Graph, stay_prob: float) -> TransitionMatrix:
    if not 0.0 <= stay_prob <= 1.0:
        raise ValidationError(f"Stay probability must be in [0, 1], got {stay_prob}")

    n_edges = g.edge_count
    entries = np.zeros((n_edges, n_edges))
    for edge, adjacent in enumerate(g.edge_adjacency):
        if not adjacent:
            # Nowhere to move: keep the mass on the edge
            entries[edge, edge] = 1.0
            continue
        entries[edge, edge] = stay_prob
        entries[list(adjacent), edge] = (1.0 - stay_prob) / len(adjacent)
    entries.setflags(write=False)
    return TransitionMatrix(entries=entries)


def propagate_marginal(
    theta: TransitionMatrix, q0: np.ndarray, steps: int
) -> np.ndarray:
    """Theta^steps applied to q0 by repeated matrix-vector products."""
    q = np.array(q0, dtype=float)
    for _ in range(steps):
        q = theta.entries @ q
    return q


def combine_union(marginals: np.ndarray) -> np.ndarray:
    """Probability that at least one independent adversary occupies each edge.

    Args:
        marginals: Array of shape (M, E), one distribution per adversary

    Returns:
        Array of shape (E,) with 1 - prod_j (1 - q_j)
    """
    marginals = np.asarray(marginals, dtype=float)
    if marginals.shape[0] == 0:
        return np.zeros(marginals.shape[1:])
    # Accumulating rho + q (1 - rho) keeps the single-adversary case exact
    risk = marginals[0].copy()
    for q in marginals[1:]:
        risk = risk + q * (1.0 - risk)
    risk = np.maximum(risk, marginals.max(axis=0))
    return np.clip(risk, 0.0, 1.0)


def forecast(g: Graph, model: AdversaryModel, horizon: int) -> RiskForecast:
    if horizon < 0:
        raise ValidationError(f"Horizon must be non-negative, got {horizon}")
    model.check_against(g)

    theta = build_transition_matrix(g, model.stay_prob)
    marginals = np.zeros((model.count, horizon + 1, g.edge_count))
    for j, edge in enumerate(model.initial_edges):
        marginals[j, 0, edge] = 1.0
        for t in range(horizon):
            marginals[j, t + 1] = theta.entries @ marginals[j, t]

    risk = np.zeros((horizon + 1, g.edge_count))
    for t in range(horizon + 1):
        risk[t] = combine_union(marginals[:, t, :])

    marginals.setflags(write=False)
    risk.setflags(write=False)
    return RiskForecast(horizon=horizon, marginals=marginals, risk=risk)


def sample_trajectories(
    model: AdversaryModel, theta: TransitionMatrix, horizon: int, seed: int
) -> AdversaryTrajectory:
    """Sample every adversary step by step from the column of its current edge."""
    rng = np.random.default_rng(seed)
    cumulative = np.cumsum(theta.entries, axis=0)
    if cumulative.size:
        cumulative[-1, :] = 1.0

    edges = np.zeros((model.count, horizon + 1), dtype=np.int64)
    edges[:, 0] = model.initial_edges
    for t in range(horizon):
        draws = rng.random(model.count)
        for j in range(model.count):
            current = edges[j, t]
            edges[j, t + 1] = np.searchsorted(
                cumulative[:, current], draws[j], side="right"
            )
    edges.setflags(write=False)
    return AdversaryTrajectory(edges=edges)


def brute_force_marginal(g: Graph, model: AdversaryModel, steps: int) -> np.ndarray:
    """Exact single-adversary marginal by enumerating every edge sequence."""
    if model.count != 1:
        raise ValidationError("Brute-force marginals take exactly one adversary")
    max_branching = 1 + max((len(a) for a in g.edge_adjacency), default=0)
    paths = max_branching**steps
    if paths > MAX_ENUMERATED_PATHS:
        raise EnumerationLimitError(paths, MAX_ENUMERATED_PATHS)

    theta = build_transition_matrix(g, model.stay_prob)
    result = np.zeros(g.edge_count)

    def walk(edge: int, probability: float, remaining: int) -> None:
        if remaining == 0:
            result[edge] += probability
            return
        for nxt in (edge, *g.edge_adjacency[edge]):
            p = theta.entries[nxt, edge]
            if p > 0.0:
                walk(nxt, probability * p, remaining - 1)

    walk(model.initial_edges[0], 1.0, steps)
    return result


def initial_distribution(edge_count: int, edge: int) -> np.ndarray:
    q0 = np.zeros(edge_count)
    q0[edge] = 1.0
    return q0


def risk_totals(risk_forecast: RiskForecast, edges: Sequence[int]) -> np.ndarray:
    """Cumulative risk over t = 1..T for the given edges."""
    return risk_forecast.risk[1:, list(edges)].sum(axis=0)
