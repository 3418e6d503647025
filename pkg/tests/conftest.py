"""
File: conftest.py

Overview:
Shared pytest fixtures for the shotflow test-suite. Services are stateless, so fixtures only
build inputs: shooting profiles for the worked lineups, seeded random lineups for the
property suites, paths to the bundled synthetic data and a click runner for CLI tests.

Fixtures:
- `profile_factory`: Builds a ShootingProfile with a Faker-generated player id unless one is given.
- `identical_lineup`, `flat_star_lineup`, `nash_lineup`: Hand-solved five-player lineups.
- `random_lineups`: 1000 seeded all-negative-slope lineups.
- `fixtures_dir` and the per-file path fixtures: Bundled CSV/JSON data under tests/fixtures.
- `runner`: click CliRunner with logging setup patched out.
"""

# Standard library imports
from builtins import range, str
from pathlib import Path

# Third-party imports
import numpy as np
import pytest
from click.testing import CliRunner
from faker import Faker

# Application-specific imports
from settings.config import Settings
from shotflow.schemas.profile_schemas import ShootingProfile

# Seeded so generated ids are stable between runs
fake = Faker()
Faker.seed(2024)

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def config():
    return Settings()


@pytest.fixture
def profile_factory():
    def build(slope: float, intercept: float, player_id: str = None, n_games: int = 20, r_squared: float = 0.5):
        return ShootingProfile(
            player_id=player_id or fake.unique.user_name(),
            slope=slope,
            intercept=intercept,
            n_games=n_games,
            r_squared=r_squared,
        )
    return build


# Five copies of f(x) = -0.5x + 0.6; uniform 0.2 is optimal with F = 0.5
@pytest.fixture
def identical_lineup(profile_factory):
    return [profile_factory(-0.5, 0.6, player_id=f"p{i}") for i in range(1, 6)]


# One flat 0.7 shooter and four (-1, 0.5) players; optimum (0.4, 0.15, ...) with F = 0.49
@pytest.fixture
def flat_star_lineup(profile_factory):
    return [profile_factory(0.0, 0.7, player_id="p1")] + [
        profile_factory(-1.0, 0.5, player_id=f"p{i}") for i in range(2, 6)
    ]


# Equilibrium efficiency mu = 3.7 / 9
@pytest.fixture
def nash_lineup(profile_factory):
    return [profile_factory(-1.0, 0.7, player_id="p1")] + [
        profile_factory(-0.5, 0.5, player_id=f"p{i}") for i in range(2, 6)
    ]


@pytest.fixture(scope="session")
def random_lineups():
    rng = np.random.default_rng(1729)
    lineups = []
    for n in range(1000):
        slopes = rng.uniform(-2.0, -0.05, size=5)
        intercepts = rng.uniform(0.2, 0.9, size=5)
        lineups.append([
            ShootingProfile(player_id=f"q{n}_{i}", slope=float(slopes[i]), intercept=float(intercepts[i]),
                            n_games=20, r_squared=0.5)
            for i in range(5)
        ])
    return lineups


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def season_logs_path():
    return FIXTURES / "season_game_logs.csv"


@pytest.fixture
def malformed_logs_path():
    return FIXTURES / "malformed_game_logs.csv"


@pytest.fixture
def noisy_samples_path():
    return FIXTURES / "noisy_usage_samples.csv"


@pytest.fixture
def roster_profiles_path():
    return FIXTURES / "roster_profiles.json"


@pytest.fixture
def starter_profiles_path():
    return FIXTURES / "starter_profiles.json"


@pytest.fixture
def four_profiles_path():
    return FIXTURES / "four_profiles.json"


# fileConfig binds handlers to the stream that is current at setup time, which CliRunner closes
@pytest.fixture
def runner(mocker):
    mocker.patch("shotflow.main.setup_logging")
    return CliRunner()
