from builtins import ValueError, bool, float, int, str
from enum import Enum
from typing import List
from pydantic import BaseModel, ConfigDict, Field, field_validator

GAME_LOG_COLUMNS = ("player_id", "game_id", "minutes", "started", "fga", "fta", "points")

# Hard sanity cap on minutes in one game (regulation plus generous overtime)
MAX_GAME_MINUTES = 96.0


class GameLogRow(BaseModel):
    """One player's box-score line for one game."""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    player_id: str = Field(..., min_length=1, example="p1")
    game_id: str = Field(..., min_length=1, example="g1")
    minutes: float = Field(..., ge=0.0, le=MAX_GAME_MINUTES, example=24.0)  # decimal minutes played
    started: bool = Field(..., example=True)
    fga: int = Field(..., ge=0, example=20)  # field-goal attempts
    fta: int = Field(..., ge=0, example=5)  # free-throw attempts
    points: int = Field(..., ge=0, example=30)

    # The CSV encodes `started` strictly as 0/1
    @field_validator("started", mode="before")
    @classmethod
    def started_flag(cls, value):
        if isinstance(value, bool):
            return value
        text = str(value).strip()
        if text not in ("0", "1"):
            raise ValueError("started must be 0 or 1")
        return text == "1"

    @property
    def total_shots(self) -> int:
        return self.fga + self.fta


class PlayerGameMetrics(BaseModel):
    """Derived per-game true shooting percentage and fraction of team shots."""
    model_config = ConfigDict(frozen=True)

    player_id: str
    game_id: str
    ts_pct: float = Field(..., ge=0.0)
    fts: float = Field(..., ge=0.0)
    total_shots: int = Field(..., ge=0)


class SkippedGame(BaseModel):
    player_id: str
    game_id: str
    reason: str


class MetricsReport(BaseModel):
    """Metrics sorted by (player_id, game_id) plus every row that was excluded."""
    metrics: List[PlayerGameMetrics] = Field(default_factory=list)
    skipped: List[SkippedGame] = Field(default_factory=list)


class GroupKind(str, Enum):
    STARTERS = "starters"
    ROSTER = "roster"


class GroupCriterion(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: GroupKind = Field(..., example="starters")
    threshold: int = Field(..., ge=1, example=30)  # game count
