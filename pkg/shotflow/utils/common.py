import logging
import logging.config
import os
from typing import Optional


def setup_logging(level: Optional[str] = None):
    """
    Sets up logging for the command line tool using the repository's logging.conf.
    Every handler writes to standard error, leaving stdout for command output.
    """
    # Construct the path to 'logging.conf', assuming it's in the project's root.
    logging_config_path = os.path.join(os.path.dirname(__file__), '..', '..', 'logging.conf')
    # Normalize the path to handle any '..' correctly.
    normalized_path = os.path.normpath(logging_config_path)
    if os.path.exists(normalized_path):
        logging.config.fileConfig(normalized_path, disable_existing_loggers=False)
    else:
        logging.basicConfig(format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    if level:
        for name in ("", "shotflow"):
            logging.getLogger(name).setLevel(level.upper())
