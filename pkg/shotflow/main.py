import logging
from builtins import dict, float, int, len, list, next, range, set, sorted, str, zip
from typing import Any, Dict, List, Optional, Sequence

import click

from settings.config import Settings
from shotflow.dependencies import load_run_config
from shotflow.schemas.allocation_schemas import SolveReport
from shotflow.schemas.game_log_schemas import GroupKind
from shotflow.schemas.profile_schemas import ShootingProfile
from shotflow.schemas.strategy_schemas import StrategyName
from shotflow.services.allocator_service import AllocatorService
from shotflow.services.behavior_service import BehaviorService
from shotflow.services.braess_service import BraessService
from shotflow.services.ingest_service import IngestService
from shotflow.services.lineup_service import LINEUP_CSV_COLUMNS, LineupService
from shotflow.services.strategy_service import StrategyService
from shotflow.utils.common import setup_logging
from shotflow.utils.exceptions import DegenerateNash, InfeasibleLineup, InputError, MissingProfile, ShotflowError
from shotflow.utils.serialization import csv_text, dumps, read_bytes, read_json, write_text

logger = logging.getLogger(__name__)

METRICS_CSV_COLUMNS = ("player_id", "game_id", "ts_pct", "fts", "total_shots")
PROFILE_CSV_COLUMNS = ("player_id", "slope", "intercept", "n_games", "r_squared", "positive_slope", "peak_usage")
GROUP_CSV_COLUMNS = ("group", "strategy", "feasible_count", "mean_payoff", "min_payoff", "max_payoff", "relative_gain")


class ShotflowGroup(click.Group):
    """Click group that turns domain errors into the documented exit codes."""

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except ShotflowError as e:
            logger.error(f"{type(e).__name__}: {e.detail}")
            click.echo(f"error: {e.detail}", err=True)
            ctx.exit(e.exit_code)


class RunContext:
    """Per-invocation state shared by the subcommands."""

    def __init__(self, config: Settings, output_format: str, out: Optional[str]):
        self.config = config
        self.output_format = output_format
        self.out = out

    def emit(self, text: str, out: Optional[str] = None) -> None:
        target = out or self.out
        if target:
            write_text(target, text)
        else:
            click.echo(text, nl=False)

    def json(self, payload: Any) -> str:
        return dumps(payload, decimals=self.config.float_decimals)

    def csv(self, rows: Sequence[Dict[str, Any]], columns: Sequence[str]) -> str:
        return csv_text(rows, columns, decimals=self.config.float_decimals)


pass_run = click.make_pass_decorator(RunContext)
out_option = click.option("--out", "out", type=click.Path(dir_okay=False), default=None,
                          help="Write the result to this file instead of standard output.")


@click.group(cls=ShotflowGroup)
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="JSON configuration file (falls back to $SHOTFLOW_CONFIG).")
@click.option("--format", "output_format", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@out_option
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False), default=None)
@click.option("--shot-cap", type=float, default=None, help="Per-player cap on the fraction of team shots.")
@click.option("--ft-weight", type=float, default=None, help="Free-throw weight in true shooting percentage.")
@click.option("--regulation-minutes", type=float, default=None)
@click.option("--min-games-fit", type=int, default=None)
@click.option("--starters-threshold", type=int, default=None)
@click.option("--roster-threshold", type=int, default=None)
@click.option("--grid-step", type=float, default=None)
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], output_format: str, out: Optional[str],
        log_level: Optional[str], **overrides: Any) -> None:
    """Shot allocation models fitted from game logs."""
    config = load_run_config(config_path, log_level=log_level, **overrides)
    setup_logging(config.log_level)
    ctx.obj = RunContext(config, output_format, out)


@cli.command("ingest")
@click.argument("logs_path", type=click.Path(dir_okay=False))
@out_option
@pass_run
def cmd_ingest(run: RunContext, logs_path: str, out: Optional[str]) -> None:
    """Compute per-game TS% and FTS from a game-log CSV."""
    rows = IngestService.parse_game_logs(read_bytes(logs_path))
    report = IngestService.compute_metrics(rows, run.config)
    for skip in report.skipped:
        click.echo(f"skipped {skip.player_id} {skip.game_id}: {skip.reason}", err=True)
    click.echo(f"{len(report.metrics)} player-games kept, {len(report.skipped)} skipped", err=True)
    if run.output_format == "csv":
        run.emit(run.csv(report.metrics, METRICS_CSV_COLUMNS), out)
    else:
        run.emit(run.json(report.metrics), out)


@cli.command("fit")
@click.argument("metrics_path", type=click.Path(dir_okay=False))
@out_option
@pass_run
def cmd_fit(run: RunContext, metrics_path: str, out: Optional[str]) -> None:
    """Fit one shooting profile per player from a metrics file."""
    metrics = IngestService.load_metrics(read_json(metrics_path))
    report = BehaviorService.fit_profiles(IngestService.samples_by_player(metrics), run.config.min_games_fit)
    for skip in report.skipped:
        click.echo(f"skipped {skip.player_id}: {skip.reason}", err=True)
    if not report.profiles:
        raise InputError(f"no player has {run.config.min_games_fit} fittable games")
    if run.output_format == "csv":
        run.emit(run.csv(report.profiles, PROFILE_CSV_COLUMNS), out)
    else:
        run.emit(run.json(report.profiles), out)


def _load_profiles(path: str):
    return BehaviorService.load_profiles(read_json(path))


def _verify_optimum(lineup: Sequence[ShootingProfile], optimal: SolveReport, config: Settings) -> Dict[str, Any]:
    """Grid-search payoff at the configured step and how far the optimum sits above it."""
    try:
        grid = AllocatorService.grid_oracle(lineup, config.grid_step, config.shot_cap)
    except InfeasibleLineup as e:
        logger.warning(f"Grid search found no feasible point: {e.detail}")
        return {"grid_step": config.grid_step, "grid_payoff": None, "gap": None}
    return {"grid_step": config.grid_step, "grid_payoff": grid.payoff, "gap": optimal.payoff - grid.payoff}


@cli.command("compare")
@click.argument("profiles_path", type=click.Path(dir_okay=False))
@click.argument("player_ids", nargs=5)
@click.option("--verify", is_flag=True, default=False,
              help="Also run the grid search at the configured grid step and report its gap to the optimum.")
@out_option
@pass_run
def cmd_compare(run: RunContext, profiles_path: str, player_ids: Sequence[str], verify: bool,
                out: Optional[str]) -> None:
    """Compare every strategy on one five-player lineup."""
    repeated = sorted({player_id for player_id in player_ids if player_ids.count(player_id) > 1})
    if repeated:
        raise InputError(f"lineup repeats {', '.join(repeated)}")
    profiles = _load_profiles(profiles_path)
    missing = [player_id for player_id in player_ids if player_id not in profiles]
    if missing:
        raise MissingProfile(missing[0])
    lineup = [profiles[player_id] for player_id in player_ids]
    cap = run.config.shot_cap

    optimal = AllocatorService.solve_optimal(lineup, cap)
    reports = StrategyService.compare(lineup, cap, optimal=optimal)
    nash = next(report for report in reports if report.strategy is StrategyName.NASH)
    poa = None
    if nash.payoff is not None:
        try:
            poa = StrategyService.price_of_anarchy(nash, optimal)
        except DegenerateNash as e:
            logger.warning(e.detail)
            poa = e.metrics
    verification = _verify_optimum(lineup, optimal, run.config) if verify else None

    if run.output_format == "csv":
        rows = []
        for report in reports:
            row: Dict[str, Any] = {"strategy": report.strategy.value, "payoff": report.payoff, "feasible": report.feasible}
            for i in range(len(player_ids)):
                row[f"x{i + 1}"] = report.allocation[i] if report.allocation else None
            rows.append(row)
        columns = ["strategy", "payoff", "feasible"] + [f"x{i + 1}" for i in range(len(player_ids))]
        run.emit(run.csv(rows, columns), out)
        if poa is not None:
            ratio = "n/a" if poa.ratio is None else f"{poa.ratio:.{run.config.float_decimals}f}"
            click.echo(f"price_of_anarchy ratio={ratio} difference={poa.difference:.{run.config.float_decimals}f}", err=True)
        if verification is not None:
            cells = ["n/a" if value is None else f"{value:.{run.config.float_decimals}f}" for value in verification.values()]
            click.echo("verification " + " ".join(f"{key}={cell}" for key, cell in zip(verification, cells)), err=True)
    else:
        run.emit(run.json({
            "lineup": list(player_ids),
            "strategies": reports,
            "optimal": optimal,
            "price_of_anarchy": poa,
            **({"verification": verification} if verify else {}),
        }), out)


@cli.command("enumerate")
@click.argument("profiles_path", type=click.Path(dir_okay=False))
@click.option("--group", "group_flag", type=click.Choice(["starters", "roster", "both"]), default="roster", show_default=True)
@click.option("--logs", "logs_path", type=click.Path(dir_okay=False), default=None,
              help="Game-log CSV used to select group members; without it every profile is in the group.")
@click.option("--lineups-csv", type=click.Path(dir_okay=False), default=None,
              help="Also write per-lineup `lineup,strategy,payoff,feasible` rows to this file.")
@out_option
@pass_run
def cmd_enumerate(run: RunContext, profiles_path: str, group_flag: str, logs_path: Optional[str],
                  lineups_csv: Optional[str], out: Optional[str]) -> None:
    """Evaluate every five-player lineup of a player group."""
    profiles = _load_profiles(profiles_path)
    kinds = [GroupKind.STARTERS, GroupKind.ROSTER] if group_flag == "both" else [GroupKind(group_flag)]
    rows = IngestService.parse_game_logs(read_bytes(logs_path)) if logs_path else None
    if rows is None and len(kinds) > 1:
        raise InputError("--group both needs --logs to tell starters from the roster")

    summaries = []
    lineup_rows: List[Dict[str, Any]] = []
    for kind in kinds:
        if rows is None:
            members = sorted(profiles)
        else:
            selected = IngestService.filter_group(rows, IngestService.criterion_for(kind, run.config))
            unfitted = sorted(selected - set(profiles))
            if unfitted:
                logger.warning(f"{kind.value} players without a profile left out: {', '.join(unfitted)}")
            members = sorted(selected & set(profiles))
        results = LineupService.evaluate_lineups(profiles, members, run.config.shot_cap)
        summaries.append(LineupService.summarize(kind, len(members), results))
        for row in LineupService.lineup_rows(results):
            lineup_rows.append(dict(row, group=kind.value) if len(kinds) > 1 else row)

    if lineups_csv:
        columns = (("group",) if len(kinds) > 1 else ()) + LINEUP_CSV_COLUMNS
        write_text(lineups_csv, run.csv(lineup_rows, columns))

    if run.output_format == "csv":
        table = []
        for summary in summaries:
            for name, stats in summary.per_strategy.items():
                table.append({
                    "group": summary.group.value, "strategy": name.value, "feasible_count": stats.feasible_count,
                    "mean_payoff": stats.mean_payoff, "min_payoff": stats.min_payoff, "max_payoff": stats.max_payoff,
                    "relative_gain": summary.relative_gains.get(name),
                })
        run.emit(run.csv(table, GROUP_CSV_COLUMNS), out)
    else:
        run.emit(run.json(summaries[0] if len(summaries) == 1 else summaries), out)


@cli.command("braess")
@click.argument("n_agents", type=int)
@click.argument("constant_cost", type=float)
@click.argument("linear_coeff", type=float)
@out_option
@pass_run
def cmd_braess(run: RunContext, n_agents: int, constant_cost: float, linear_coeff: float, out: Optional[str]) -> None:
    """Selfish versus coordinated routing on the two-link network."""
    net = BraessService.network(n_agents, constant_cost, linear_coeff)
    equilibrium = BraessService.braess_equilibrium(net)
    optimum = BraessService.braess_optimal(net)
    poa = BraessService.braess_price_of_anarchy(net)
    if run.output_format == "csv":
        run.emit(run.csv([{
            "n_agents": net.n_agents,
            "equilibrium_sub_lane": equilibrium.sub_lane_count,
            "equilibrium_cost": equilibrium.total_cost,
            "optimal_sub_lane": optimum.sub_lane_count,
            "optimal_cost": optimum.total_cost,
            "ratio": poa.ratio,
        }], ("n_agents", "equilibrium_sub_lane", "equilibrium_cost", "optimal_sub_lane", "optimal_cost", "ratio")), out)
    else:
        run.emit(run.json({
            "network": net,
            "equilibrium": {"sub_lane_count": equilibrium.sub_lane_count, "total_cost": equilibrium.total_cost},
            "optimal": optimum,
            "price_of_anarchy": poa,
        }), out)


@cli.command("config")
@out_option
@pass_run
def cmd_config(run: RunContext, out: Optional[str]) -> None:
    """Write the effective configuration as JSON (loadable with --config)."""
    run.emit(run.config.to_json(), out)
