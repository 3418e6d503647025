from builtins import bool, float, int, str
from typing import List, Optional
from pydantic import BaseModel, ConfigDict, Field, computed_field


class UsageSample(BaseModel):
    """One game's (fraction of team shots, true shooting percentage) observation."""
    model_config = ConfigDict(frozen=True)

    fts: float
    ts_pct: float


class ShootingProfile(BaseModel):
    """
    Fitted affine shooting behavior f(x) = slope * x + intercept of one player,
    mapping a fraction of team shots x to true shooting percentage.
    """
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    player_id: str = Field(..., min_length=1, example="p1")
    slope: float = Field(..., example=-0.5)  # change in TS% per unit of usage
    intercept: float = Field(..., example=0.6)  # TS% at zero usage
    n_games: int = Field(..., ge=2, example=20)
    r_squared: float = Field(..., ge=0.0, le=1.0, example=0.42)

    @computed_field
    @property
    def positive_slope(self) -> bool:
        # efficiency does not fall with usage for this player
        return self.slope >= 0

    @computed_field
    @property
    def peak_usage(self) -> Optional[float]:
        """Usage at which x * f(x) peaks; only defined for a falling efficiency line."""
        if self.slope < 0:
            return -self.intercept / (2 * self.slope)
        return None


class FitSkip(BaseModel):
    player_id: str
    reason: str


class FitReport(BaseModel):
    profiles: List[ShootingProfile] = Field(default_factory=list)  # sorted by player_id
    skipped: List[FitSkip] = Field(default_factory=list)
