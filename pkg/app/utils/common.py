import logging
import logging.config
from pathlib import Path
from typing import Optional

from app.dependencies import get_settings

settings = get_settings()

# logging.conf sits in the project root, two levels above this package
LOGGING_CONFIG_PATH = Path(__file__).resolve().parents[2] / "logging.conf"


def setup_logging(debug: Optional[bool] = None):
    """
    Loads logging.conf for the command line.

    Records go to stderr so that stdout only carries the run summary.

    Args:
        debug (bool): Force DEBUG on the app logger; None falls back to settings.debug.
    """
    logging.config.fileConfig(LOGGING_CONFIG_PATH, disable_existing_loggers=False)
    if settings.debug if debug is None else debug:
        logging.getLogger("app").setLevel(logging.DEBUG)
