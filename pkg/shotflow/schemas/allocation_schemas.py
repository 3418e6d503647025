from builtins import float, str
from enum import Enum
from typing import List, Optional
from pydantic import BaseModel, ConfigDict, Field

LINEUP_SIZE = 5


class Allocation(BaseModel):
    """Fractions of team shots x1..x5, aligned with a lineup's player order."""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    x: List[float] = Field(..., min_length=LINEUP_SIZE, max_length=LINEUP_SIZE, example=[0.2, 0.2, 0.2, 0.2, 0.2])


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


class BoundFlag(str, Enum):
    LOWER = "lower"  # x = 0
    INTERIOR = "interior"
    UPPER = "upper"  # x = effective upper bound


class SolveReport(BaseModel):
    """Maximizer of the team payoff and the KKT quantities behind it."""
    player_ids: List[str]
    allocation: Allocation
    payoff: float
    per_player_utility: List[float]
    marginals: List[float]  # 2 * slope * x + intercept per player
    multiplier: Optional[float] = None  # common marginal value of the interior players
    status: SolveStatus = SolveStatus.OPTIMAL
    active_bounds: List[BoundFlag]
