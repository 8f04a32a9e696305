"""Config, logging setup, error roots and atomic persistence."""

from .config import SecregenConfig, get_config
from .errors import SecregenError, ValidationError, VerificationError

__all__ = [
    "SecregenConfig",
    "get_config",
    "SecregenError",
    "ValidationError",
    "VerificationError",
]
