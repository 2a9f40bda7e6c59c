"""Cross-topic causal chain construction.

A chain links an earlier pair's effect expression to a later pair's
cause expression in a different topic when their cosine similarity
strictly exceeds the threshold. All ordered topic pairs are scanned,
so the same front may feed many rears and vice versa. Output order is
canonical -- sorted by (rear id, front id) -- which makes the result
independent of how the per-topic-pair work is scheduled.
"""

from __future__ import annotations

import csv
import datetime as dt
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .embedding import Vector, cosine
from .errors import ConfigError, InputError
from .extraction import CausalPair
from .months import month_lag, month_of

DEFAULT_THRESHOLD = 0.5

# pair id -> (cause vector, effect vector)
PairVectors = dict[int, tuple[Vector, Vector]]


@dataclass(frozen=True)
class CausalChain:
    front: int
    rear: int
    front_topic: str
    rear_topic: str
    front_date: dt.date
    rear_date: dt.date
    lag_days: int
    similarity: float

    @property
    def topic_pair(self) -> tuple[str, str]:
        return (self.front_topic, self.rear_topic)

    @property
    def rear_month(self) -> str:
        return month_of(self.rear_date)


def _scan_topic_pair(
    fronts: list[CausalPair],
    rears: list[CausalPair],
    vectors: PairVectors,
    threshold: float,
    window_months: int | None,
) -> list[CausalChain]:
    chains: list[CausalChain] = []
    for rear in rears:
        rear_cause_vec = vectors[rear.id][0]
        for front in fronts:
            if front.date >= rear.date:
                continue
            if window_months is not None:
                if month_lag(month_of(front.date), month_of(rear.date)) > window_months:
                    continue
            similarity = cosine(vectors[front.id][1], rear_cause_vec)
            if similarity > threshold:
                chains.append(
                    CausalChain(
                        front=front.id,
                        rear=rear.id,
                        front_topic=front.topic,
                        rear_topic=rear.topic,
                        front_date=front.date,
                        rear_date=rear.date,
                        lag_days=(rear.date - front.date).days,
                        similarity=similarity,
                    )
                )
    return chains


def build_chains(
    pairs: list[CausalPair],
    vectors: PairVectors,
    threshold: float = DEFAULT_THRESHOLD,
    window_months: int | None = None,
    workers: int = 1,
) -> list[CausalChain]:
    """Link every (front, rear) combination across distinct topics.

    Emits a chain iff front.date < rear.date strictly, the topics
    differ, and cosine(front effect, rear cause) > threshold strictly.
    ``window_months`` optionally caps the calendar-month lag (off by
    default: history is unbounded).
    """
    if not 0.0 < threshold <= 1.0:
        raise ConfigError(f"threshold must lie in (0, 1], got {threshold}")
    if window_months is not None and window_months < 0:
        raise ConfigError(f"window must be non-negative, got {window_months}")
    missing = [p.id for p in pairs if p.id not in vectors]
    if missing:
        raise InputError(f"missing vectors for pair ids {missing[:5]}")

    by_topic: dict[str, list[CausalPair]] = {}
    for pair in pairs:
        by_topic.setdefault(pair.topic, []).append(pair)
    topics = sorted(by_topic)
    tasks = [(a, b) for a in topics for b in topics if a != b]

    def run(task: tuple[str, str]) -> list[CausalChain]:
        return _scan_topic_pair(
            by_topic[task[0]], by_topic[task[1]], vectors, threshold, window_months
        )

    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(task) for task in tasks]

    chains = [chain for result in results for chain in result]
    chains.sort(key=lambda c: (c.rear, c.front))
    return chains


def chain_counts(chains: list[CausalChain]) -> dict[tuple[str, str], int]:
    """Chains per ordered topic pair; absent pairs count as zero."""
    counts: dict[tuple[str, str], int] = {}
    for chain in chains:
        counts[chain.topic_pair] = counts.get(chain.topic_pair, 0) + 1
    return counts


CHAINS_HEADER = [
    "front_pair_id",
    "rear_pair_id",
    "front_topic",
    "rear_topic",
    "front_date",
    "rear_date",
    "lag_days",
    "similarity",
]


def write_chains_csv(chains: list[CausalChain], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CHAINS_HEADER)
        for c in chains:
            writer.writerow(
                [
                    c.front,
                    c.rear,
                    c.front_topic,
                    c.rear_topic,
                    c.front_date.isoformat(),
                    c.rear_date.isoformat(),
                    c.lag_days,
                    repr(c.similarity),
                ]
            )


def read_chains_csv(path: str | Path) -> list[CausalChain]:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"chains file not found: {path}")
    chains: list[CausalChain] = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CHAINS_HEADER:
            raise InputError(f"{path}: bad header {header!r}, expected {CHAINS_HEADER}")
        for row_no, row in enumerate(reader, start=2):
            if len(row) != len(CHAINS_HEADER):
                raise InputError(f"{path}:{row_no}: expected {len(CHAINS_HEADER)} columns")
            try:
                chains.append(
                    CausalChain(
                        front=int(row[0]),
                        rear=int(row[1]),
                        front_topic=row[2],
                        rear_topic=row[3],
                        front_date=dt.date.fromisoformat(row[4]),
                        rear_date=dt.date.fromisoformat(row[5]),
                        lag_days=int(row[6]),
                        similarity=float(row[7]),
                    )
                )
            except ValueError as exc:
                raise InputError(f"{path}:{row_no}: {exc}") from None
    return chains
