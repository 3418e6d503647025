import logging
import math
from builtins import any, float, len, list, max, min, range, sorted, str
from typing import List, Optional, Sequence

import numpy as np
from scipy import optimize

from shotflow.dependencies import get_settings
from shotflow.schemas.allocation_schemas import SolveReport
from shotflow.schemas.profile_schemas import ShootingProfile
from shotflow.schemas.strategy_schemas import Constraint, PoaMetrics, StrategyName, StrategyReport
from shotflow.services.allocator_service import (
    ROOT_TOLERANCE, SUM_TOLERANCE, AllocatorService, _check_lineup, clipped_response, effective_upper_bound,
    stationary_levels,
)
from shotflow.services.behavior_service import utility_at
from shotflow.utils.exceptions import DegenerateNash, NashUndefined, NoEqualUtilitySolution

logger = logging.getLogger(__name__)

UTILITY_TOLERANCE = 1e-9
ROOT_BRACKET_TOLERANCE = 1e-10
ROOT_XTOL = 1e-15
ROOT_MAX_ITER = 200


def _smallest_usage(profile: ShootingProfile, target: float) -> float:
    """Smallest x >= 0 with slope * x^2 + intercept * x = target, for intercept > 0."""
    disc = max(profile.intercept ** 2 + 4.0 * profile.slope * target, 0.0)
    # rationalized root, exact for slope = 0 and free of cancellation
    return 2.0 * target / (profile.intercept + math.sqrt(disc))


def _usage_ceiling(profile: ShootingProfile, cap: float) -> float:
    """Largest usage on the rising branch of the utility curve within the effective bound."""
    bound = effective_upper_bound(profile, cap)
    if profile.slope < 0:
        return min(bound, -profile.intercept / (2.0 * profile.slope))
    return bound


class StrategyService:

    @classmethod
    def evaluate(cls, strategy: StrategyName, profiles: Sequence[ShootingProfile], x: Sequence[float],
                 cap: Optional[float] = None) -> StrategyReport:
        """Payoff of an allocation and the constraints it violates."""
        cap = get_settings().shot_cap if cap is None else cap
        values = [float(v) for v in x]
        utilities = [utility_at(profile, value) for profile, value in zip(profiles, values)]
        violated: List[Constraint] = []
        if abs(math.fsum(values) - 1.0) > SUM_TOLERANCE:
            violated.append(Constraint.SUM_TO_ONE)
        if any(value < 0.0 or value > cap + ROOT_TOLERANCE for value in values):
            violated.append(Constraint.SHOT_CAP)
        if any(u < -UTILITY_TOLERANCE for u in utilities):
            violated.append(Constraint.NON_NEGATIVE_UTILITY)
        return StrategyReport(
            strategy=strategy,
            player_ids=[p.player_id for p in profiles],
            allocation=values,
            per_player_utility=utilities,
            payoff=math.fsum(utilities),
            feasible=not violated,
            violated_constraints=violated,
        )

    @classmethod
    def unavailable(cls, strategy: StrategyName, profiles: Sequence[ShootingProfile], reason: str) -> StrategyReport:
        return StrategyReport(
            strategy=strategy,
            player_ids=[p.player_id for p in profiles],
            feasible=False,
            violated_constraints=[Constraint.UNDEFINED],
            note=reason,
        )

    @classmethod
    def from_solve(cls, report: SolveReport) -> StrategyReport:
        return StrategyReport(
            strategy=StrategyName.OPTIMAL,
            player_ids=report.player_ids,
            allocation=list(report.allocation.x),
            per_player_utility=report.per_player_utility,
            payoff=report.payoff,
            feasible=True,
        )

    @classmethod
    def star_feed(cls, profiles: Sequence[ShootingProfile], cap: Optional[float] = None) -> StrategyReport:
        """
        The highest-intercept player takes the capped share and the rest is split equally.
        Intercept ties go to the smallest player_id.
        """
        _check_lineup(profiles)
        cap = get_settings().shot_cap if cap is None else cap
        star = min(range(len(profiles)), key=lambda i: (-profiles[i].intercept, profiles[i].player_id))
        share = (1.0 - cap) / (len(profiles) - 1)
        x = [cap if i == star else share for i in range(len(profiles))]
        return cls.evaluate(StrategyName.STAR_FEED, profiles, x, cap)

    @classmethod
    def equal_shots(cls, profiles: Sequence[ShootingProfile], cap: Optional[float] = None) -> StrategyReport:
        _check_lineup(profiles)
        x = [1.0 / len(profiles)] * len(profiles)
        return cls.evaluate(StrategyName.EQUAL_SHOTS, profiles, x, cap)

    @classmethod
    def equal_utility(cls, profiles: Sequence[ShootingProfile], cap: Optional[float] = None) -> StrategyReport:
        """
        Every player contributes the same utility u, each with the smallest usage reaching u.

        The total usage grows strictly with u, so u is the root of the shot shortfall, found with brentq.

        :raises NoEqualUtilitySolution: If no common utility covers every shot within the bounds.
        """
        _check_lineup(profiles)
        cap = get_settings().shot_cap if cap is None else cap
        ceilings = [_usage_ceiling(p, cap) for p in profiles]
        reachable = [utility_at(p, c) if p.intercept > 0 else 0.0 for p, c in zip(profiles, ceilings)]
        top = min(reachable)
        if top <= 0.0:
            raise NoEqualUtilitySolution("a player cannot contribute positive utility")

        def usage(target: float) -> List[float]:
            return [min(_smallest_usage(p, target), c) for p, c in zip(profiles, ceilings)]

        def shortfall(target: float) -> float:
            return math.fsum(usage(target)) - 1.0

        if shortfall(top) < -ROOT_BRACKET_TOLERANCE:
            raise NoEqualUtilitySolution(f"equal utilities cover at most {math.fsum(usage(top)):.6f} of the shots")

        if shortfall(top) <= 0.0:
            level = top
        else:
            level = optimize.brentq(shortfall, 0.0, top, xtol=ROOT_XTOL, maxiter=ROOT_MAX_ITER)
        return cls.evaluate(StrategyName.EQUAL_UTILITY, profiles, usage(level), cap)

    @classmethod
    def nash_equal_efficiency(cls, profiles: Sequence[ShootingProfile], cap: Optional[float] = None) -> StrategyReport:
        """
        Selfish equilibrium: every player with positive usage shoots at the same efficiency mu,
        x_i = clip((mu - intercept_i) / slope_i, 0, cap).

        :raises NashUndefined: If a slope is not negative.
        """
        _check_lineup(profiles)
        cap = get_settings().shot_cap if cap is None else cap
        if any(p.slope >= 0 for p in profiles):
            raise NashUndefined("efficiencies never equalize with a non-negative slope")
        slopes = np.array([p.slope for p in profiles], dtype=float)
        intercepts = np.array([p.intercept for p in profiles], dtype=float)
        bounds = np.full(len(profiles), cap)
        empty = np.array([], dtype=float)
        levels = stationary_levels(slopes, intercepts, bounds, empty, empty, 1.0)
        if not levels:
            raise NashUndefined("no common efficiency covers every shot")
        x = clipped_response(slopes, intercepts, bounds, levels[0])
        return cls.evaluate(StrategyName.NASH, profiles, x.tolist(), cap)

    @classmethod
    def price_of_anarchy(cls, nash: StrategyReport, optimal: SolveReport) -> PoaMetrics:
        """
        Ratio optimal / equilibrium payoff together with the difference optimal - equilibrium.

        :raises DegenerateNash: If the equilibrium payoff is not positive; the exception
            carries the metrics with the ratio omitted.
        """
        if nash.payoff is None:
            raise NashUndefined(nash.note or "no equilibrium allocation")
        metrics = PoaMetrics(
            nash_payoff=nash.payoff,
            optimal_payoff=optimal.payoff,
            difference=optimal.payoff - nash.payoff,
        )
        if nash.payoff <= 0.0:
            raise DegenerateNash(metrics)
        return metrics.model_copy(update={"ratio": optimal.payoff / nash.payoff})

    @classmethod
    def compare(cls, profiles: Sequence[ShootingProfile], cap: Optional[float] = None,
                optimal: Optional[SolveReport] = None) -> List[StrategyReport]:
        """
        Every strategy on one lineup, best payoff first (ties by strategy name).
        Strategies without an allocation are listed last with a note.

        :param optimal: An already solved optimum for the same lineup and cap, reused as is.
        :raises InfeasibleLineup: Propagated from the optimal solver.
        """
        cap = get_settings().shot_cap if cap is None else cap
        optimal = optimal or AllocatorService.solve_optimal(profiles, cap)
        reports = [cls.from_solve(optimal)]
        reports.append(cls.star_feed(profiles, cap))
        reports.append(cls.equal_shots(profiles, cap))
        for strategy, run in ((StrategyName.EQUAL_UTILITY, cls.equal_utility),
                              (StrategyName.NASH, cls.nash_equal_efficiency)):
            try:
                reports.append(run(profiles, cap))
            except (NoEqualUtilitySolution, NashUndefined) as e:
                logger.debug(f"{strategy.value} unavailable: {e.detail}")
                reports.append(cls.unavailable(strategy, profiles, f"{type(e).__name__}: {e.detail}"))
        return sorted(reports, key=lambda r: (r.payoff is None, -(r.payoff or 0.0), r.strategy.value))
