"""Overlap-managed metric index forest."""

import json

from ._core import (
    Error,
    Forest,
    ball_volume,
    build,
    classify_regime,
    dbm_rate,
    generate_clusters,
    load,
    vbm_rate,
)

__all__ = [
    "Error",
    "Forest",
    "ball_volume",
    "build",
    "classify_regime",
    "dbm_rate",
    "generate_clusters",
    "load",
    "stats",
    "vbm_rate",
]


def stats(forest):
    """Build stats of a forest as a dict."""
    return json.loads(forest.stats_json())
