import io
import logging
import re
from builtins import bytes, dict, float, int, isinstance, len, set, sorted, str
from collections import defaultdict
from typing import BinaryIO, Dict, Iterable, List, Optional, Set, Union

import pandas as pd
from pydantic import ValidationError

from settings.config import Settings
from shotflow.dependencies import get_settings
from shotflow.schemas.game_log_schemas import (
    GAME_LOG_COLUMNS, GameLogRow, GroupCriterion, GroupKind, MetricsReport, PlayerGameMetrics, SkippedGame,
)
from shotflow.schemas.profile_schemas import UsageSample
from shotflow.utils.exceptions import (
    DuplicatePlayerGame, EmptyDataset, InputError, MalformedHeader, MalformedRow, UndefinedMetric,
)

logger = logging.getLogger(__name__)

_PARSER_LINE = re.compile(r"line (\d+)")


def true_shooting_pct(points: int, fga: int, fta: int, ft_weight: Optional[float] = None) -> float:
    """
    True shooting percentage: 0.5 * points / (fga + ft_weight * fta).

    :param ft_weight: Free-throw weight; the configured value (0.44 by default) when omitted.
    :raises UndefinedMetric: If the weighted attempt count is zero.
    """
    weight = get_settings().ft_weight if ft_weight is None else ft_weight
    denominator = fga + weight * fta
    if denominator <= 0:
        raise UndefinedMetric(f"true shooting percentage undefined for fga={fga}, fta={fta}")
    return 0.5 * points / denominator


def fraction_team_shots(player_shots: int, team_shots: int, player_minutes: float,
                        regulation_minutes: Optional[float] = None) -> float:
    """
    Player's share of team shots scaled to a full regulation game:
    (player_shots / team_shots) * (regulation_minutes / player_minutes).

    :raises UndefinedMetric: If the team took no shots or the player logged no minutes.
    """
    regulation = get_settings().regulation_minutes if regulation_minutes is None else regulation_minutes
    if team_shots <= 0:
        raise UndefinedMetric("fraction of team shots undefined: team took no shots")
    if player_minutes <= 0:
        raise UndefinedMetric("fraction of team shots undefined: player logged no minutes")
    return (player_shots / team_shots) * (regulation / player_minutes)


class IngestService:

    @classmethod
    def parse_game_logs(cls, source: Union[bytes, BinaryIO]) -> List[GameLogRow]:
        """
        Parse a UTF-8 game-log CSV into validated rows, in file order.

        :param source: Raw CSV bytes or a binary stream.
        :return: One GameLogRow per record.
        :raises MalformedHeader: If the header is not exactly the documented column list.
        :raises MalformedRow: If a record fails type or range validation (1-based record index).
        :raises DuplicatePlayerGame: If a (player_id, game_id) pair repeats.
        """
        raw = source if isinstance(source, bytes) else source.read()
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise InputError(f"game log is not valid UTF-8: {e}") from e
        frame = cls._read_frame(text)

        rows: List[GameLogRow] = []
        seen: Set[tuple] = set()
        for index, record in enumerate(frame.to_dict(orient="records"), start=1):
            # short records are padded with NaN by the parser
            if not all(isinstance(record.get(name), str) for name in GAME_LOG_COLUMNS):
                raise MalformedRow(index, "wrong number of fields")
            try:
                row = GameLogRow.model_validate({name: record[name].strip() for name in GAME_LOG_COLUMNS})
            except ValidationError as e:
                first = e.errors()[0]
                field = first["loc"][0] if first["loc"] else "row"
                raise MalformedRow(index, f"{field}: {first['msg']}") from e
            key = (row.player_id, row.game_id)
            if key in seen:
                raise DuplicatePlayerGame(row.player_id, row.game_id)
            seen.add(key)
            rows.append(row)
        logger.info(f"Parsed {len(rows)} game-log rows")
        return rows

    @classmethod
    def _read_frame(cls, text: str) -> pd.DataFrame:
        options = dict(header=None, index_col=False, dtype=str, keep_default_na=False)
        try:
            header = tuple(pd.read_csv(io.StringIO(text), nrows=1, **options).iloc[0])
        except pd.errors.EmptyDataError as e:
            raise MalformedHeader("game log is empty; expected header " + ",".join(GAME_LOG_COLUMNS)) from e
        if header != GAME_LOG_COLUMNS:
            raise MalformedHeader(f"expected header {','.join(GAME_LOG_COLUMNS)}, found {','.join(header)}")
        # header=None pins the width to the header's field count: longer records fail to tokenize
        # rather than shifting into an inferred index
        try:
            raw = pd.read_csv(io.StringIO(text), **options)
        except pd.errors.ParserError as e:
            match = _PARSER_LINE.search(str(e))
            # parser lines count the header as line 1
            index = int(match.group(1)) - 1 if match else 0
            raise MalformedRow(index, "wrong number of fields") from e
        frame = raw.iloc[1:].reset_index(drop=True)
        frame.columns = list(GAME_LOG_COLUMNS)
        return frame

    @classmethod
    def compute_metrics(cls, rows: List[GameLogRow], config: Optional[Settings] = None) -> MetricsReport:
        """
        Per-game true shooting percentage and fraction of team shots for every row.

        Team shots for a game are the unweighted fga + fta summed over all rows of that game.
        Rows with zero minutes or an undefined metric are reported in `skipped`.

        :raises EmptyDataset: If no rows are given.
        """
        if not rows:
            raise EmptyDataset("no game-log rows to compute metrics from")
        config = config or get_settings()

        frame = pd.DataFrame([row.model_dump() for row in rows])
        frame["shots"] = frame["fga"] + frame["fta"]
        frame["team_shots"] = frame.groupby("game_id")["shots"].transform("sum")
        frame = frame.sort_values(["player_id", "game_id"], kind="mergesort")

        metrics: List[PlayerGameMetrics] = []
        skipped: List[SkippedGame] = []
        for record in frame.to_dict(orient="records"):
            player_id, game_id = record["player_id"], record["game_id"]
            if record["minutes"] <= 0:
                skipped.append(SkippedGame(player_id=player_id, game_id=game_id, reason="zero minutes"))
                continue
            try:
                ts_pct = true_shooting_pct(int(record["points"]), int(record["fga"]), int(record["fta"]),
                                           config.ft_weight)
                fts = fraction_team_shots(int(record["shots"]), int(record["team_shots"]),
                                          float(record["minutes"]), config.regulation_minutes)
            except UndefinedMetric as e:
                skipped.append(SkippedGame(player_id=player_id, game_id=game_id, reason=e.detail))
                continue
            metrics.append(PlayerGameMetrics(
                player_id=player_id, game_id=game_id, ts_pct=ts_pct, fts=fts, total_shots=int(record["shots"]),
            ))
        if skipped:
            logger.warning(f"Skipped {len(skipped)} player-games with undefined metrics")
        logger.info(f"Computed metrics for {len(metrics)} player-games")
        return MetricsReport(metrics=metrics, skipped=skipped)

    @classmethod
    def filter_group(cls, rows: Iterable[GameLogRow], criterion: GroupCriterion) -> Set[str]:
        """
        Players meeting a participation criterion: games started for starters,
        games with minutes played for the roster.
        """
        counts: Dict[str, int] = defaultdict(int)
        for row in rows:
            if criterion.kind is GroupKind.STARTERS and row.started:
                counts[row.player_id] += 1
            elif criterion.kind is GroupKind.ROSTER and row.minutes > 0:
                counts[row.player_id] += 1
        return {player_id for player_id, count in counts.items() if count >= criterion.threshold}

    @classmethod
    def criterion_for(cls, kind: GroupKind, config: Optional[Settings] = None) -> GroupCriterion:
        config = config or get_settings()
        threshold = config.starters_threshold if kind is GroupKind.STARTERS else config.roster_threshold
        return GroupCriterion(kind=kind, threshold=threshold)

    @classmethod
    def load_metrics(cls, data: List[dict]) -> List[PlayerGameMetrics]:
        """Validate a decoded metrics JSON array."""
        if not isinstance(data, list):
            raise InputError("metrics file must hold a JSON array")
        try:
            return [PlayerGameMetrics.model_validate(item) for item in data]
        except ValidationError as e:
            raise InputError(f"invalid metrics record: {e}") from e

    @classmethod
    def samples_by_player(cls, metrics: Iterable[PlayerGameMetrics]) -> Dict[str, List[UsageSample]]:
        samples: Dict[str, List[UsageSample]] = defaultdict(list)
        for item in sorted(metrics, key=lambda m: (m.player_id, m.game_id)):
            samples[item.player_id].append(UsageSample(fts=item.fts, ts_pct=item.ts_pct))
        return dict(samples)
