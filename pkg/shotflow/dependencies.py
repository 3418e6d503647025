import logging
import os
from builtins import Exception, str
from pathlib import Path
from typing import Any, Optional, Union
from pydantic import ValidationError
from settings.config import CONFIG_ENV_VAR, Settings, build_settings, settings
from shotflow.utils.exceptions import ConfigError, DataIOError

logger = logging.getLogger(__name__)

def get_settings() -> Settings:
    """Return the settings built from the environment and defaults."""
    return settings

def load_run_config(config_path: Optional[Union[str, Path]] = None, **overrides: Any) -> Settings:
    """Resolve the effective run configuration.

    The config file is `config_path` when given, otherwise the file named by SHOTFLOW_CONFIG.
    Flag overrides win over the file; unset flags are passed as None and ignored.
    """
    path = config_path or os.environ.get(CONFIG_ENV_VAR) or None
    if path is not None:
        logger.info(f"Loading configuration from {path}")
    try:
        return build_settings(path, **overrides)
    except OSError as e:
        raise DataIOError(path, e.strerror or str(e)) from e
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {e}") from e
    except Exception as e:
        raise ConfigError(f"invalid configuration file {path}: {e}") from e
