from pathlib import Path

from .fixtures import *

CONFIG_DIR = (Path(__file__).parent.parent / "configs").resolve()
