import logging
import sys

from colorama import Fore, Style, just_fix_windows_console

ROOT = "qfabric"

COLOR_GREEN = Fore.GREEN
COLOR_YELLOW = Fore.YELLOW
COLOR_RED = Fore.RED
COLOR_RESET = Style.RESET_ALL

_LEVEL_COLORS = {
    logging.DEBUG: Style.DIM,
    logging.INFO: COLOR_GREEN,
    logging.WARNING: COLOR_YELLOW,
    logging.ERROR: COLOR_RED,
    logging.CRITICAL: COLOR_RED,
}


def color_text(text, color):
    return f"{color}{text}{COLOR_RESET}"


class TaggedFormatter(logging.Formatter):
    """Renders records as `[TAG] message`, colored by level."""

    def __init__(self, colored=True):
        super().__init__()
        self.colored = colored

    def format(self, record):
        tag = record.name.rsplit(".", 1)[-1].upper()
        text = f"[{tag}] {record.getMessage()}"
        if record.exc_info:
            text = f"{text}\n{self.formatException(record.exc_info)}"
        if not self.colored:
            return text
        return color_text(text, _LEVEL_COLORS.get(record.levelno, ""))


def get_logger(component):
    return logging.getLogger(f"{ROOT}.{component}")


def configure(verbose=False, level=None):
    """Attach the stderr handler to the package root logger (idempotent)."""
    root = logging.getLogger(ROOT)
    if not any(getattr(h, "_qfabric", False) for h in root.handlers):
        just_fix_windows_console()
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(TaggedFormatter(colored=sys.stderr.isatty()))
        handler._qfabric = True
        root.addHandler(handler)
    if verbose:
        root.setLevel(logging.DEBUG)
    elif level is not None:
        root.setLevel(level)
    return root
