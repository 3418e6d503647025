import logging
from builtins import float, len, sorted, str
from collections import Counter
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from shotflow.dependencies import get_settings
from shotflow.schemas.profile_schemas import FitReport, FitSkip, ShootingProfile, UsageSample
from shotflow.utils.exceptions import DegenerateFit, DomainError, InputError, InsufficientSamples

logger = logging.getLogger(__name__)

Sample = Union[UsageSample, Tuple[float, float]]


def efficiency_at(profile: ShootingProfile, x: float) -> float:
    """True shooting percentage at usage x: slope * x + intercept (may be negative)."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"usage fraction {x} outside [0, 1]")
    return profile.slope * x + profile.intercept


def utility_at(profile: ShootingProfile, x: float) -> float:
    """Expected scoring contribution x * f(x) of a player taking fraction x of team shots."""
    return x * efficiency_at(profile, x)


def _as_pairs(samples: Iterable[Sample]) -> List[Tuple[float, float]]:
    pairs = [(s.fts, s.ts_pct) if isinstance(s, UsageSample) else (float(s[0]), float(s[1])) for s in samples]
    # fixed order makes the fit independent of sample order
    return sorted(pairs)


class BehaviorService:

    @classmethod
    def fit_profile(cls, player_id: str, samples: Sequence[Sample], min_games: Optional[int] = None) -> ShootingProfile:
        """
        Ordinary least squares fit of true shooting percentage on fraction of team shots.

        :param player_id: Player the samples belong to.
        :param samples: (fts, ts_pct) observations, one per game.
        :param min_games: Minimum number of samples; the configured min_games_fit when omitted.
        :return: The fitted ShootingProfile.
        :raises InsufficientSamples: If fewer than `min_games` samples are given.
        :raises DegenerateFit: If every sample has the same fts.
        """
        required = get_settings().min_games_fit if min_games is None else min_games
        pairs = _as_pairs(samples)
        if len(pairs) < max(required, 2):
            raise InsufficientSamples(f"player {player_id!r} has {len(pairs)} games, {required} required")

        data = np.asarray(pairs, dtype=float)
        x, y = data[:, 0], data[:, 1]
        if np.all(x == x[0]):
            raise DegenerateFit(f"player {player_id!r} has identical fts in every game")

        x_mean, y_mean = x.mean(), y.mean()
        dx, dy = x - x_mean, y - y_mean
        slope = float(np.dot(dx, dy) / np.dot(dx, dx))
        intercept = float(y_mean - slope * x_mean)

        residuals = y - (slope * x + intercept)
        ss_res = float(np.dot(residuals, residuals))
        ss_tot = float(np.dot(dy, dy))
        r_squared = 1.0 if ss_tot == 0.0 else float(np.clip(1.0 - ss_res / ss_tot, 0.0, 1.0))

        try:
            return ShootingProfile(player_id=player_id, slope=slope, intercept=intercept,
                                   n_games=len(pairs), r_squared=r_squared)
        except ValidationError as e:
            raise InputError(f"cannot build profile for {player_id!r}: {e}") from e

    @classmethod
    def fit_profiles(cls, samples: Dict[str, Sequence[Sample]], min_games: Optional[int] = None) -> FitReport:
        """Fit every player; players that cannot be fitted are listed in `skipped` with the reason."""
        profiles: List[ShootingProfile] = []
        skipped: List[FitSkip] = []
        for player_id in sorted(samples):
            try:
                profile = cls.fit_profile(player_id, samples[player_id], min_games)
            except (InsufficientSamples, DegenerateFit) as e:
                logger.warning(f"Skipping {player_id}: {e.detail}")
                skipped.append(FitSkip(player_id=player_id, reason=f"{type(e).__name__}: {e.detail}"))
                continue
            if profile.positive_slope:
                logger.warning(f"Player {player_id} has a non-negative usage slope {profile.slope:.6f}")
            profiles.append(profile)
        logger.info(f"Fitted {len(profiles)} shooting profiles, skipped {len(skipped)}")
        return FitReport(profiles=profiles, skipped=skipped)

    @classmethod
    def load_profiles(cls, data: object) -> Dict[str, ShootingProfile]:
        """Validate a decoded profiles JSON array into a map keyed by player_id."""
        if not isinstance(data, list):
            raise InputError("profiles file must hold a JSON array")
        try:
            profiles = [ShootingProfile.model_validate(item) for item in data]
        except ValidationError as e:
            raise InputError(f"invalid profile record: {e}") from e
        duplicates = sorted(player_id for player_id, count in Counter(p.player_id for p in profiles).items() if count > 1)
        if duplicates:
            raise InputError(f"duplicate profiles for {', '.join(duplicates)}")
        return {profile.player_id: profile for profile in profiles}
