from builtins import Exception, int, str
from typing import Any, Optional


class ShotflowError(Exception):
    """Base class for every error the CLI reports; `exit_code` is the process status."""
    exit_code: int = 2

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class DataIOError(ShotflowError):
    """Reading or writing a file failed."""
    exit_code = 1

    def __init__(self, path: Any, reason: str):
        super().__init__(f"cannot access {path}: {reason}")
        self.path = str(path)


# Input and validation errors (exit 2)

class InputError(ShotflowError):
    exit_code = 2


class ConfigError(InputError):
    pass


class MalformedHeader(InputError):
    pass


class MalformedRow(InputError):
    def __init__(self, index: int, reason: str):
        super().__init__(f"row {index}: {reason}")
        self.index = index
        self.reason = reason


class DuplicatePlayerGame(InputError):
    def __init__(self, player_id: str, game_id: str):
        super().__init__(f"duplicate row for player {player_id!r} in game {game_id!r}")
        self.player_id = player_id
        self.game_id = game_id


class EmptyDataset(InputError):
    pass


class UndefinedMetric(InputError):
    pass


class DomainError(InputError):
    pass


class InsufficientSamples(InputError):
    pass


class DegenerateFit(InputError):
    pass


class InvalidAllocation(InputError):
    pass


class TooFewPlayers(InputError):
    pass


class MissingProfile(InputError):
    def __init__(self, player_id: str):
        super().__init__(f"no shooting profile for player {player_id!r}")
        self.player_id = player_id


class InvalidNetwork(InputError):
    pass


# Model errors (exit 3)

class ModelError(ShotflowError):
    exit_code = 3


class InfeasibleLineup(ModelError):
    def __init__(self, bound_sum: float, detail: Optional[str] = None):
        super().__init__(detail or f"lineup cannot cover all shots: effective bounds sum to {bound_sum:.6f} < 1")
        self.bound_sum = bound_sum


class NoEqualUtilitySolution(ModelError):
    pass


class NashUndefined(ModelError):
    pass


class DegenerateNash(ModelError):
    """Equilibrium payoff is not positive; `metrics` still carries the difference."""

    def __init__(self, metrics: Any):
        super().__init__("equilibrium payoff is not positive, price-of-anarchy ratio omitted")
        self.metrics = metrics
