from builtins import ValueError, float, int, len, set, sorted, str
from typing import Dict, List, Optional
from pydantic import BaseModel, ConfigDict, Field, field_validator

from shotflow.schemas.game_log_schemas import GroupKind
from shotflow.schemas.strategy_schemas import StrategyName


class Lineup(BaseModel):
    """Distinct player ids in canonical ascending order."""
    model_config = ConfigDict(frozen=True)

    players: List[str] = Field(..., min_length=1, example=["p1", "p2", "p3", "p4", "p5"])

    @field_validator("players")
    @classmethod
    def canonical_order(cls, value: List[str]) -> List[str]:
        if len(set(value)) != len(value):
            raise ValueError("lineup players must be distinct")
        if value != sorted(value):
            raise ValueError("lineup players must be sorted ascending")
        return value

    @property
    def label(self) -> str:
        return "|".join(self.players)


class LineupResult(BaseModel):
    lineup: Lineup
    payoff: float


class StrategyStats(BaseModel):
    """Aggregate of one strategy over the lineups where it is feasible."""
    feasible_count: int = 0
    mean_payoff: Optional[float] = None
    min_payoff: Optional[float] = None
    max_payoff: Optional[float] = None
    optimal_mean_on_feasible: Optional[float] = None  # optimal strategy over the same lineups


class GroupSummary(BaseModel):
    group: GroupKind
    player_count: int
    lineup_count: int
    infeasible_lineups: int = 0
    per_strategy_mean_payoff: Dict[StrategyName, Optional[float]]
    per_strategy: Dict[StrategyName, StrategyStats]
    best_lineup: Optional[LineupResult] = None
    relative_gains: Dict[StrategyName, float]
