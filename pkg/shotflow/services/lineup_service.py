import itertools
import logging
import math
from builtins import dict, float, int, len, list, max, min, set, sorted, str
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from shotflow.dependencies import get_settings
from shotflow.schemas.allocation_schemas import LINEUP_SIZE
from shotflow.schemas.game_log_schemas import GroupKind
from shotflow.schemas.lineup_schemas import GroupSummary, Lineup, LineupResult, StrategyStats
from shotflow.schemas.profile_schemas import ShootingProfile
from shotflow.schemas.strategy_schemas import StrategyName, StrategyReport
from shotflow.services.strategy_service import StrategyService
from shotflow.utils.exceptions import InfeasibleLineup, MissingProfile, TooFewPlayers

logger = logging.getLogger(__name__)

LINEUP_CSV_COLUMNS = ("lineup", "strategy", "payoff", "feasible")


def _mean(values: List[float]) -> Optional[float]:
    # fsum is exact, so the mean does not depend on lineup order
    return math.fsum(values) / len(values) if values else None


class LineupService:

    @classmethod
    def enumerate_lineups(cls, player_ids: Iterable[str], k: int = LINEUP_SIZE) -> List[Lineup]:
        """
        All k-player combinations in canonical ascending order, sorted lexicographically.

        :raises TooFewPlayers: If fewer than k distinct players are given.
        """
        players = sorted(set(player_ids))
        if len(players) < k:
            raise TooFewPlayers(f"group has {len(players)} players, {k} needed for a lineup")
        return [Lineup(players=list(combo)) for combo in itertools.combinations(players, k)]

    @classmethod
    def evaluate_lineups(cls, profiles: Mapping[str, ShootingProfile], group: Iterable[str],
                         cap: Optional[float] = None) -> List[Tuple[Lineup, Optional[List[StrategyReport]]]]:
        """
        Strategy comparison for every lineup of a group; None marks a lineup the optimal solver
        found infeasible.

        :raises MissingProfile: If a group member has no profile.
        :raises TooFewPlayers: If the group has fewer than five members.
        """
        cap = get_settings().shot_cap if cap is None else cap
        members = sorted(set(group))
        for player_id in members:
            if player_id not in profiles:
                raise MissingProfile(player_id)
        results: List[Tuple[Lineup, Optional[List[StrategyReport]]]] = []
        for lineup in cls.enumerate_lineups(members):
            lineup_profiles = [profiles[player_id] for player_id in lineup.players]
            try:
                results.append((lineup, StrategyService.compare(lineup_profiles, cap)))
            except InfeasibleLineup as e:
                logger.warning(f"Lineup {lineup.label} infeasible: {e.detail}")
                results.append((lineup, None))
        return results

    @classmethod
    def summarize(cls, kind: GroupKind, player_count: int,
                  results: List[Tuple[Lineup, Optional[List[StrategyReport]]]]) -> GroupSummary:
        """
        Group-level aggregate: per-strategy means over the lineups where that strategy is
        feasible, the best optimal lineup and the relative gain of the optimal strategy.
        """
        payoffs: Dict[StrategyName, List[float]] = {name: [] for name in StrategyName}
        paired_optimal: Dict[StrategyName, List[float]] = {name: [] for name in StrategyName}
        best: Optional[LineupResult] = None
        infeasible = 0

        for lineup, reports in results:
            if reports is None:
                infeasible += 1
                continue
            by_name = {report.strategy: report for report in reports}
            optimal_payoff = by_name[StrategyName.OPTIMAL].payoff
            for name, report in by_name.items():
                if report.feasible:
                    payoffs[name].append(report.payoff)
                    paired_optimal[name].append(optimal_payoff)
            # results arrive in lexicographic lineup order, so strict > keeps the first on ties
            if best is None or optimal_payoff > best.payoff:
                best = LineupResult(lineup=lineup, payoff=optimal_payoff)

        per_strategy: Dict[StrategyName, StrategyStats] = {}
        gains: Dict[StrategyName, float] = {}
        for name in StrategyName:
            values = payoffs[name]
            stats = StrategyStats(
                feasible_count=len(values),
                mean_payoff=_mean(values),
                min_payoff=min(values) if values else None,
                max_payoff=max(values) if values else None,
                optimal_mean_on_feasible=_mean(paired_optimal[name]),
            )
            per_strategy[name] = stats
            if name is not StrategyName.OPTIMAL and stats.mean_payoff:
                gains[name] = (stats.optimal_mean_on_feasible - stats.mean_payoff) / stats.mean_payoff

        return GroupSummary(
            group=kind,
            player_count=player_count,
            lineup_count=len(results),
            infeasible_lineups=infeasible,
            per_strategy_mean_payoff={name: stats.mean_payoff for name, stats in per_strategy.items()},
            per_strategy=per_strategy,
            best_lineup=best,
            relative_gains=gains,
        )

    @classmethod
    def evaluate_group(cls, profiles: Mapping[str, ShootingProfile], group: Iterable[str],
                       kind: GroupKind = GroupKind.ROSTER, cap: Optional[float] = None) -> GroupSummary:
        members = sorted(set(group))
        results = cls.evaluate_lineups(profiles, members, cap)
        summary = cls.summarize(kind, len(members), results)
        logger.info(f"Evaluated {summary.lineup_count} {kind.value} lineups ({summary.infeasible_lineups} infeasible)")
        return summary

    @classmethod
    def lineup_rows(cls, results: List[Tuple[Lineup, Optional[List[StrategyReport]]]]) -> List[dict]:
        """Flat `lineup,strategy,payoff,feasible` rows for plotting."""
        rows: List[dict] = []
        for lineup, reports in results:
            if reports is None:
                rows.append({"lineup": lineup.label, "strategy": StrategyName.OPTIMAL.value,
                             "payoff": None, "feasible": False})
                continue
            for report in sorted(reports, key=lambda r: r.strategy.value):
                rows.append({"lineup": lineup.label, "strategy": report.strategy.value,
                             "payoff": report.payoff, "feasible": report.feasible})
        return rows
