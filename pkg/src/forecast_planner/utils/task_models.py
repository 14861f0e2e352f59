from dataclasses import dataclass


@dataclass(frozen=True)
class RobotTask:
    """Start and goal node of one robot."""

    start: int
    goal: int
