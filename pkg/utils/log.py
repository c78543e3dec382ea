# File: utils/log.py
import logging

import colorama
from colorama import Fore, Style

from models.exceptions import ConfigError
from utils.config import Config

LEVEL_COLORS = {
    logging.DEBUG: Style.DIM,
    logging.INFO: "",
    logging.WARNING: Fore.YELLOW,
    logging.ERROR: Fore.RED,
    logging.CRITICAL: Fore.RED + Style.BRIGHT,
}


class ColorFormatter(logging.Formatter):
    """Colours the level name; plain text when colour is off"""

    def __init__(self, fmt="%(levelname)-7s %(name)s: %(message)s", use_color=True):
        super().__init__(fmt)
        self.use_color = use_color

    def format(self, record):
        message = super().format(record)
        color = LEVEL_COLORS.get(record.levelno, "")
        if self.use_color and color:
            return f"{color}{message}{Style.RESET_ALL}"
        return message


def setup_logging(level=None, use_color=True):
    """Send log records to stderr. Safe to call more than once."""
    colorama.just_fix_windows_console()
    level = (level or Config.RWA_LOG_LEVEL).upper()
    if not isinstance(logging.getLevelName(level), int):
        raise ConfigError(f"Unknown log level '{level}'")
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_rwa_handler", False):
            root.removeHandler(handler)
    handler = logging.StreamHandler()
    handler.setFormatter(ColorFormatter(use_color=use_color))
    handler._rwa_handler = True
    root.addHandler(handler)
    root.setLevel(level)
    return root
