"""Locates and loads the bundled data assets.

Resolution order per asset: explicit override path (CLI flag), the
PRIBOM_DATA_DIR environment directory, then the package's data/
directory.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .errors import PribomError

API_PERMISSION_MAP = "api_permission_map.json"
PERMISSION_CATALOG = "permission_catalog.json"
WIDGET_API_TABLE = "widget_api_table.json"
TPL_SIGNATURES = "tpl_signatures.json"
TPL_METADATA = "tpl_metadata.json"
LEXICON = "lexicon.json"
TAXONOMY_MAP = "taxonomy_map.json"

_PACKAGE_DATA = Path(__file__).resolve().parent / "data"


def asset_path(name: str, override: str | os.PathLike | None = None) -> Path:
    if override is not None:
        return Path(override)
    env_dir = os.environ.get("PRIBOM_DATA_DIR")
    if env_dir:
        candidate = Path(env_dir) / name
        if candidate.exists():
            return candidate
    return _PACKAGE_DATA / name


def load_json_asset(name: str, override: str | os.PathLike | None = None):
    path = asset_path(name, override)
    try:
        with open(path, "rb") as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise PribomError(f"data asset {name} not found at {path}")
    except json.JSONDecodeError as exc:
        raise PribomError(f"data asset {path} is not valid JSON: {exc}")
