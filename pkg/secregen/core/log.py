"""Centralized logging configuration for the secregen CLI.

Call setup_logging() once at startup (in cli.main.run()) to configure:
- StreamHandler → stderr (the CLI's stdout is reserved for reports)
- RotatingFileHandler → <log_dir>/secregen.log when a log directory is configured
- Noisy third-party loggers suppressed to WARNING
- sys.excepthook → routes unhandled exceptions through logging
"""

import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path

# Third-party loggers that spam at DEBUG/INFO level
_NOISY_LOGGERS = ("filelock",)

_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
_DATEFMT = "%Y-%m-%d %H:%M:%S"


def setup_logging(level: str | int = logging.WARNING, log_dir: Path | None = None) -> None:
    """Configure the root logger.

    Args:
        level: Root log level (name or number).
        log_dir: Directory for the rotating log file (created if missing).
            ``None`` logs to stderr only.
    """
    formatter = logging.Formatter(_FORMAT, datefmt=_DATEFMT)

    root = logging.getLogger()
    root.setLevel(level)
    for handler in list(root.handlers):
        root.removeHandler(handler)

    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(formatter)
    root.addHandler(console)

    if log_dir is not None:
        log_dir.mkdir(parents=True, exist_ok=True)
        # 500 KB, keep 2 backups
        file_handler = RotatingFileHandler(
            log_dir / "secregen.log",
            maxBytes=512_000,
            backupCount=2,
        )
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)

    for name in _NOISY_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)

    _logger = logging.getLogger("secregen.crash")

    def _excepthook(exc_type, exc_value, exc_tb):
        if issubclass(exc_type, KeyboardInterrupt):
            sys.__excepthook__(exc_type, exc_value, exc_tb)
            return
        _logger.critical("Unhandled exception", exc_info=(exc_type, exc_value, exc_tb))

    sys.excepthook = _excepthook
