from builtins import bool, dict, float, int, isinstance, list, str, tuple
import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Mapping, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from shotflow.utils.exceptions import DataIOError, InputError

logger = logging.getLogger(__name__)


def format_float(value: float, decimals: int = 6) -> str:
    """Fixed-point text for a float; negative zero prints as zero."""
    text = f"{value:.{decimals}f}"
    if text.startswith("-") and float(text) == 0.0:
        text = text[1:]
    return text


def to_plain(obj: Any) -> Any:
    """Turn pydantic models and enums into dicts/lists/scalars, keeping field order."""
    if isinstance(obj, BaseModel):
        return to_plain(obj.model_dump())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Mapping):
        return {to_plain(key): to_plain(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(item) for item in obj]
    return obj


def _encode(obj: Any, decimals: int, level: int, indent: int) -> str:
    pad = " " * (indent * (level + 1))
    close = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj, decimals)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(key))}: {_encode(value, decimals, level + 1, indent)}" for key, value in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        items = [f"{pad}{_encode(item, decimals, level + 1, indent)}" for item in obj]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, decimals: int = 6, indent: int = 2) -> str:
    """
    Deterministic JSON text: keys in model field order, every float with `decimals` places.

    :param obj: A pydantic model, a list of models, or plain JSON-compatible data.
    :param decimals: Decimal places written for each float.
    :param indent: Spaces per nesting level.
    :return: The JSON document followed by a newline.
    """
    return _encode(to_plain(obj), decimals, 0, indent) + "\n"


def _cell(value: Any, decimals: int) -> Any:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if value is None or (isinstance(value, float) and pd.isna(value)):
        return ""
    if isinstance(value, float):
        return format_float(value, decimals)
    return value


def csv_text(rows: Sequence[Mapping[str, Any]], columns: Sequence[str], decimals: int = 6) -> str:
    """Render rows as CSV with a fixed column order and fixed-point floats."""
    frame = pd.DataFrame([to_plain(row) for row in rows], columns=list(columns))
    for column in frame.columns:
        frame[column] = [_cell(value, decimals) for value in frame[column]]
    return frame.to_csv(index=False, lineterminator="\n")


def write_text(path: Union[str, Path], text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        logger.error(f"Failed to write {path}: {e}")
        raise DataIOError(path, e.strerror or str(e)) from e
    logger.info(f"Wrote {path}")


def read_bytes(path: Union[str, Path]) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        logger.error(f"Failed to read {path}: {e}")
        raise DataIOError(path, e.strerror or str(e)) from e


def read_json(path: Union[str, Path]) -> Any:
    raw = read_bytes(path)
    try:
        return json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise InputError(f"{path} is not valid JSON: {e}") from e
