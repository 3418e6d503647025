import logging
import math
from builtins import float, int, range

from pydantic import ValidationError

from shotflow.schemas.strategy_schemas import (
    BraessEquilibrium, BraessOptimum, PoaConvention, PoaMetrics, TwoLinkNetwork,
)
from shotflow.utils.exceptions import InvalidNetwork

logger = logging.getLogger(__name__)


class BraessService:
    """Selfish versus coordinated routing of discrete cars over a highway and a sub lane."""

    @classmethod
    def network(cls, n_agents: int, constant_cost: float, linear_coeff: float) -> TwoLinkNetwork:
        try:
            return TwoLinkNetwork(n_agents=n_agents, constant_cost=constant_cost, linear_coeff=linear_coeff)
        except ValidationError as e:
            raise InvalidNetwork(f"invalid network: {e.errors()[0]['loc'][0]} {e.errors()[0]['msg']}") from e

    @classmethod
    def total_cost(cls, net: TwoLinkNetwork, sub_lane_count: int) -> float:
        k = sub_lane_count
        return k * k * net.linear_coeff + (net.n_agents - k) * net.constant_cost

    @classmethod
    def is_equilibrium(cls, net: TwoLinkNetwork, sub_lane_count: int) -> bool:
        """No single car lowers its own travel time by switching links."""
        k = sub_lane_count
        if k > 0 and k * net.linear_coeff > net.constant_cost:
            return False
        if k < net.n_agents and (k + 1) * net.linear_coeff < net.constant_cost:
            return False
        return True

    @classmethod
    def braess_equilibrium(cls, net: TwoLinkNetwork) -> BraessEquilibrium:
        """
        Equilibrium split of the cars. When several splits are stable the one with the most
        cars on the sub lane is returned (indifferent cars take the sub lane).
        """
        k = next(k for k in range(net.n_agents, -1, -1) if cls.is_equilibrium(net, k))
        costs = [k * net.linear_coeff] * k + [net.constant_cost] * (net.n_agents - k)
        return BraessEquilibrium(sub_lane_count=k, total_cost=math.fsum(costs), per_agent_costs=costs)

    @classmethod
    def braess_optimal(cls, net: TwoLinkNetwork) -> BraessOptimum:
        """Split minimizing total travel time, by brute force over k; ties go to fewer sub-lane cars."""
        best_k, best_cost = 0, cls.total_cost(net, 0)
        for k in range(1, net.n_agents + 1):
            cost = cls.total_cost(net, k)
            if cost < best_cost:
                best_k, best_cost = k, cost
        return BraessOptimum(sub_lane_count=best_k, total_cost=best_cost)

    @classmethod
    def braess_price_of_anarchy(cls, net: TwoLinkNetwork) -> PoaMetrics:
        equilibrium = cls.braess_equilibrium(net)
        optimum = cls.braess_optimal(net)
        logger.info(f"Braess network {net.n_agents} cars: equilibrium {equilibrium.total_cost}, optimum {optimum.total_cost}")
        return PoaMetrics(
            convention=PoaConvention.COST,
            nash_payoff=equilibrium.total_cost,
            optimal_payoff=optimum.total_cost,
            ratio=equilibrium.total_cost / optimum.total_cost,
            difference=optimum.total_cost - equilibrium.total_cost,
        )
