"""Atomic file persistence for share files, reports and exports."""

import logging
from pathlib import Path
from typing import Any

import orjson

logger = logging.getLogger(__name__)


def bytes_save_atomic(path: Path, data: bytes) -> None:
    """Atomically write *data* to *path* via tmp-file + rename.

    Creates parent directories if needed.  ``OSError`` propagates to the caller.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_bytes(data)
        tmp.replace(path)
    except OSError:
        logger.warning("Failed to save %s", path, exc_info=True)
        tmp.unlink(missing_ok=True)
        raise


def json_dumps(data: Any) -> bytes:
    """Serialize *data* as indented JSON with a trailing newline."""
    return orjson.dumps(data, option=orjson.OPT_INDENT_2 | orjson.OPT_APPEND_NEWLINE)


def json_save_atomic(path: Path, data: Any) -> None:
    """Atomically save *data* as JSON."""
    bytes_save_atomic(path, json_dumps(data))


def json_load_safe(path: Path) -> Any | None:
    """Load JSON from *path*, returning ``None`` on missing/corrupt files."""
    if not path.exists():
        return None
    try:
        return orjson.loads(path.read_bytes())
    except (orjson.JSONDecodeError, OSError) as exc:
        logger.warning("Failed to load %s: %s", path, exc)
        return None
