"""Versioned physical constants shared by the benchmark generators."""

from functools import lru_cache
import json
from importlib import resources

SUPPORTED_VERSION = 1


@lru_cache(maxsize=None)
def physics():
    data = json.loads(resources.files(__package__).joinpath("physics.json").read_text())
    if data.get("version") != SUPPORTED_VERSION:
        raise ValueError(f"unsupported physics config version {data.get('version')!r}")
    return data
