"""Narrative index pipeline.

Extracts cause/effect expression pairs from topic-labeled survey
texts, chains them across topics by embedding similarity and temporal
order, aggregates decayed monthly indices per ordered topic pair, and
correlates those against diffusion-index series.
"""

from __future__ import annotations

from pathlib import Path

__version__ = "0.1.0"

_DATA_ROOT = Path(__file__).parent / "data"


def data_path(name: str) -> Path:
    """Path of a bundled data file (clue tables, default topics, synthetic corpus)."""
    return _DATA_ROOT / name


def default_clues_en() -> Path:
    return data_path("clues_en.tsv")


def default_clues_ja() -> Path:
    return data_path("clues_ja.tsv")


def default_topics() -> Path:
    return data_path("topics_en.txt")
