import itertools
import logging
import math
from builtins import float, int, len, list, max, min, range, sorted, str, tuple
from typing import List, Optional, Sequence, Tuple

import numpy as np

from shotflow.dependencies import get_settings
from shotflow.schemas.allocation_schemas import LINEUP_SIZE, Allocation, BoundFlag, SolveReport, SolveStatus
from shotflow.schemas.profile_schemas import ShootingProfile
from shotflow.services.behavior_service import utility_at
from shotflow.utils.exceptions import DomainError, InfeasibleLineup, InvalidAllocation

logger = logging.getLogger(__name__)

SUM_TOLERANCE = 1e-9
ROOT_TOLERANCE = 1e-12

Candidate = Tuple[np.ndarray, Optional[float]]


def _check_lineup(profiles: Sequence[ShootingProfile]) -> None:
    if len(profiles) != LINEUP_SIZE:
        raise DomainError(f"expected {LINEUP_SIZE} profiles, got {len(profiles)}")


def effective_upper_bound(profile: ShootingProfile, cap: Optional[float] = None) -> float:
    """
    Largest u in [0, cap] such that the player's utility stays non-negative on [0, u].
    """
    cap = get_settings().shot_cap if cap is None else cap
    slope, intercept = profile.slope, profile.intercept
    if intercept > 0:
        if slope < 0:
            return min(cap, -intercept / slope)
        return cap
    if intercept == 0 and slope >= 0:
        return cap
    return 0.0


def clipped_response(rates: np.ndarray, intercepts: np.ndarray, bounds: np.ndarray, level: float) -> np.ndarray:
    """x_j = clip((level - b_j) / r_j, 0, u_j) for falling marginals r_j < 0."""
    return np.clip((level - intercepts) / rates, 0.0, bounds)


def stationary_levels(rates: np.ndarray, intercepts: np.ndarray, bounds: np.ndarray,
                      free_rates: np.ndarray, free_intercepts: np.ndarray, total: float) -> List[float]:
    """
    Every level L solving  sum_j clip((L - b_j)/r_j, 0, u_j) + sum_i (L - b_i)/s_i = total.

    The clipped terms (r_j < 0) are the water-filling players; the unclipped terms (s_i > 0)
    are rising-marginal players held in the interior. The left side is piecewise linear in L
    with kinks where a clipped player reaches 0 or its bound, so each linear piece is solved
    in closed form.
    """
    kinks = sorted(set(intercepts.tolist()) | set((rates * bounds + intercepts).tolist()))
    if kinks:
        pieces = [(-math.inf, kinks[0])] + list(zip(kinks[:-1], kinks[1:])) + [(kinks[-1], math.inf)]
    else:
        pieces = [(-math.inf, math.inf)]

    levels: List[float] = []
    for low, high in pieces:
        if math.isinf(low) and math.isinf(high):
            trial = 0.0
        elif math.isinf(low):
            trial = high - 1.0
        elif math.isinf(high):
            trial = low + 1.0
        else:
            trial = 0.5 * (low + high)
        raw = (trial - intercepts) / rates
        inside = (raw > 0.0) & (raw < bounds)
        at_bound = raw >= bounds
        slope = float(np.sum(1.0 / rates[inside]) + np.sum(1.0 / free_rates))
        offset = float(np.sum(bounds[at_bound]) - np.sum(intercepts[inside] / rates[inside])
                       - np.sum(free_intercepts / free_rates))
        if slope == 0.0:
            # flat piece: either no root or the whole piece solves the equation
            if abs(offset - total) <= ROOT_TOLERANCE:
                levels.extend(end for end in (low, high) if not math.isinf(end))
                if math.isinf(low) and math.isinf(high):
                    levels.append(trial)
            continue
        level = (total - offset) / slope
        slack = ROOT_TOLERANCE * (1.0 + abs(level))
        if low - slack <= level <= high + slack:
            levels.append(level)
    return levels


class AllocatorService:

    @classmethod
    def team_payoff(cls, profiles: Sequence[ShootingProfile], alloc: Allocation, cap: Optional[float] = None) -> float:
        """
        Team objective F: the sum of x_i * f_i(x_i) over the lineup.

        :raises InvalidAllocation: If the fractions do not sum to 1 or leave [0, cap].
        """
        _check_lineup(profiles)
        cap = get_settings().shot_cap if cap is None else cap
        x = alloc.x
        if abs(math.fsum(x) - 1.0) > SUM_TOLERANCE:
            raise InvalidAllocation(f"shot fractions sum to {math.fsum(x):.12f}, expected 1")
        for index, value in enumerate(x):
            if value < 0.0 or value > cap + ROOT_TOLERANCE:
                raise InvalidAllocation(f"shot fraction x{index + 1}={value} outside [0, {cap}]")
        return math.fsum(utility_at(profile, min(value, 1.0)) for profile, value in zip(profiles, x))

    @classmethod
    def solve_optimal(cls, profiles: Sequence[ShootingProfile], cap: Optional[float] = None) -> SolveReport:
        """
        Maximize the team payoff subject to the fractions summing to 1, the per-player cap
        and non-negative utilities.

        When every slope is negative the objective is strictly concave and the single
        water-filling solution is returned. Players with a non-negative slope are tried at 0,
        at their bound and in the interior, and the best case wins; ties go to the
        lexicographically smallest allocation.

        :raises InfeasibleLineup: If the effective upper bounds sum to less than 1.
        """
        _check_lineup(profiles)
        cap = get_settings().shot_cap if cap is None else cap
        slopes = np.array([p.slope for p in profiles], dtype=float)
        intercepts = np.array([p.intercept for p in profiles], dtype=float)
        bounds = np.array([effective_upper_bound(p, cap) for p in profiles], dtype=float)
        bound_sum = float(math.fsum(bounds))
        if bound_sum < 1.0 - SUM_TOLERANCE:
            logger.warning(f"Infeasible lineup {[p.player_id for p in profiles]}: bounds sum to {bound_sum:.6f}")
            raise InfeasibleLineup(bound_sum)

        candidates = cls._candidates(slopes, intercepts, bounds)
        best = cls._pick(candidates, slopes, intercepts, bounds)
        if best is None:
            raise InfeasibleLineup(bound_sum, "no allocation satisfies every constraint")
        x, level = best
        return cls._report(profiles, x, bounds, level)

    @classmethod
    def _candidates(cls, slopes: np.ndarray, intercepts: np.ndarray, bounds: np.ndarray) -> List[Candidate]:
        concave = [i for i in range(len(slopes)) if slopes[i] < 0]
        others = [i for i in range(len(slopes)) if slopes[i] >= 0]
        rates = 2.0 * slopes[concave]
        candidates: List[Candidate] = []

        for case in itertools.product(("lower", "upper", "interior"), repeat=len(others)):
            x = np.zeros(len(slopes))
            for i, state in zip(others, case):
                if state == "upper":
                    x[i] = bounds[i]
            remaining = 1.0 - float(np.sum(x))
            if remaining < -SUM_TOLERANCE:
                continue
            flat = [i for i, state in zip(others, case) if state == "interior" and slopes[i] == 0]
            rising = [i for i, state in zip(others, case) if state == "interior" and slopes[i] > 0]
            if len(flat) > 1:
                # payoff is constant along the flat players' split, the extremes are other cases
                continue

            if flat:
                levels = [float(intercepts[flat[0]])]
            elif not concave and not rising:
                if abs(remaining) <= SUM_TOLERANCE:
                    candidates.append((x.copy(), None))
                continue
            else:
                levels = stationary_levels(rates, intercepts[concave], bounds[concave],
                                           2.0 * slopes[rising], intercepts[rising], remaining)

            for level in levels:
                trial = x.copy()
                if concave:
                    trial[concave] = clipped_response(rates, intercepts[concave], bounds[concave], level)
                for i in rising:
                    trial[i] = (level - intercepts[i]) / (2.0 * slopes[i])
                if flat:
                    trial[flat[0]] = 1.0 - float(np.sum(trial))
                moved = rising + flat
                if any(trial[i] < -ROOT_TOLERANCE or trial[i] > bounds[i] + ROOT_TOLERANCE for i in moved):
                    continue
                trial = np.clip(trial, 0.0, bounds)
                if abs(float(np.sum(trial)) - 1.0) > SUM_TOLERANCE:
                    continue
                candidates.append((trial, level))
        return candidates

    @classmethod
    def _pick(cls, candidates: List[Candidate], slopes: np.ndarray, intercepts: np.ndarray,
              bounds: np.ndarray) -> Optional[Candidate]:
        if not candidates:
            return None
        payoffs = [float(np.sum(slopes * x * x + intercepts * x)) for x, _ in candidates]
        top = max(payoffs)
        tied = [c for c, value in zip(candidates, payoffs) if value >= top - ROOT_TOLERANCE]
        return min(tied, key=lambda c: tuple(np.round(c[0], 12)))

    @classmethod
    def _report(cls, profiles: Sequence[ShootingProfile], x: np.ndarray, bounds: np.ndarray,
                level: Optional[float]) -> SolveReport:
        values = [float(v) for v in x]
        utilities = [utility_at(profile, value) for profile, value in zip(profiles, values)]
        marginals = [2.0 * p.slope * value + p.intercept for p, value in zip(profiles, values)]
        flags = []
        for value, bound in zip(values, bounds):
            if value <= ROOT_TOLERANCE:
                flags.append(BoundFlag.LOWER)
            elif value >= bound - ROOT_TOLERANCE:
                flags.append(BoundFlag.UPPER)
            else:
                flags.append(BoundFlag.INTERIOR)
        return SolveReport(
            player_ids=[p.player_id for p in profiles],
            allocation=Allocation(x=values),
            payoff=math.fsum(utilities),
            per_player_utility=utilities,
            marginals=marginals,
            multiplier=level,
            status=SolveStatus.OPTIMAL,
            active_bounds=flags,
        )

    @classmethod
    def grid_oracle(cls, profiles: Sequence[ShootingProfile], step: Optional[float] = None,
                    cap: Optional[float] = None) -> SolveReport:
        """
        Best allocation on the grid of multiples of `step`, found exactly.

        A max-plus recursion over players (best payoff of players j..5 for every remaining
        number of grid units) covers the same tuples as exhaustive enumeration. Ties go to
        the lexicographically smallest allocation.

        :raises DomainError: If `step` does not divide 1 evenly.
        :raises InfeasibleLineup: If no grid point is feasible.
        """
        _check_lineup(profiles)
        config = get_settings()
        step = config.grid_step if step is None else step
        cap = config.shot_cap if cap is None else cap
        units = int(round(1.0 / step)) if step > 0 else 0
        if units < 1 or abs(units * step - 1.0) > SUM_TOLERANCE:
            raise DomainError(f"grid step {step} does not divide 1 evenly")

        grid = np.arange(units + 1) / units
        bounds = np.array([effective_upper_bound(p, cap) for p in profiles], dtype=float)
        table = np.full((len(profiles), units + 1), -np.inf)
        for j, profile in enumerate(profiles):
            allowed = grid <= bounds[j] + ROOT_TOLERANCE
            table[j, allowed] = profile.slope * grid[allowed] ** 2 + profile.intercept * grid[allowed]

        # best[j][r]: best payoff of players j.. sharing r grid units
        best = np.full((len(profiles) + 1, units + 1), -np.inf)
        best[len(profiles), 0] = 0.0
        taken = np.arange(units + 1)
        for j in range(len(profiles) - 1, -1, -1):
            rest = taken[:, None] - taken[None, :]
            scores = np.where(rest >= 0, table[j][None, :] + best[j + 1][np.clip(rest, 0, None)], -np.inf)
            best[j] = scores.max(axis=1)
        if not np.isfinite(best[0, units]):
            raise InfeasibleLineup(float(math.fsum(bounds)), "no grid allocation satisfies every constraint")

        chosen: List[int] = []
        remaining = units
        for j in range(len(profiles)):
            scores = table[j, : remaining + 1] + best[j + 1, remaining - taken[: remaining + 1]]
            target = best[j, remaining]
            k = int(np.flatnonzero(scores >= target - ROOT_TOLERANCE)[0])
            chosen.append(k)
            remaining -= k
        x = np.array(chosen, dtype=float) / units
        return cls._report(profiles, x, bounds, None)
