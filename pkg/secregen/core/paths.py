from pathlib import Path

SECREGEN_HOME = Path.home() / ".secregen"
CONFIG_PATH = SECREGEN_HOME / "config.json"
