from builtins import bool, float, int, str
from enum import Enum
from typing import List, Optional
from pydantic import BaseModel, ConfigDict, Field, model_validator


class StrategyName(str, Enum):
    OPTIMAL = "optimal"
    STAR_FEED = "star_feed"
    EQUAL_SHOTS = "equal_shots"
    EQUAL_UTILITY = "equal_utility"
    NASH = "nash"


class Constraint(str, Enum):
    """Allocation constraints a strategy can violate."""
    SUM_TO_ONE = "sum_to_one"
    SHOT_CAP = "shot_cap"
    NON_NEGATIVE_UTILITY = "non_negative_utility"
    UNDEFINED = "undefined"  # the strategy has no allocation for this lineup


class StrategyReport(BaseModel):
    strategy: StrategyName
    player_ids: List[str]
    allocation: Optional[List[float]] = None
    per_player_utility: Optional[List[float]] = None
    payoff: Optional[float] = None
    feasible: bool
    violated_constraints: List[Constraint] = Field(default_factory=list)
    note: Optional[str] = None

    @model_validator(mode="after")
    def feasible_iff_no_violations(self) -> "StrategyReport":
        if self.feasible == bool(self.violated_constraints):
            raise ValueError("feasible must be true exactly when no constraint is violated")
        return self


class PoaConvention(str, Enum):
    PAYOFF = "payoff"  # ratio = optimal / equilibrium
    COST = "cost"  # ratio = equilibrium / optimal


class PoaMetrics(BaseModel):
    """
    Price of anarchy reported both ways: the ratio used by the routing literature and the
    plain difference `optimal - nash` (in payoff or cost units, depending on convention).
    """
    convention: PoaConvention = PoaConvention.PAYOFF
    nash_payoff: float
    optimal_payoff: float
    ratio: Optional[float] = None
    difference: float


class TwoLinkNetwork(BaseModel):
    """A highway with constant travel time beside a sub lane whose time grows with its load."""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    n_agents: int = Field(..., ge=1, example=10)
    constant_cost: float = Field(..., gt=0, example=10.0)  # highway travel time
    linear_coeff: float = Field(..., gt=0, example=1.0)  # sub lane time per car on it


class BraessEquilibrium(BaseModel):
    sub_lane_count: int
    total_cost: float
    per_agent_costs: List[float]


class BraessOptimum(BaseModel):
    sub_lane_count: int
    total_cost: float
