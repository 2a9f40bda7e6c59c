"""Deterministic synthetic corpus with planted cross-topic links.

The generator writes a corpus whose only above-threshold links (under
the builtin provider) are the planted ones: each planted link is a
front record whose effect expression equals, verbatim, a later rear
record's cause expression in a different topic, so their cosine is 1.0.
Filler records use random lowercase gibberish; generation brute-forces
every cross-topic candidate and retries with a fresh seed until all
non-planted similarities sit below a safety margin under the threshold,
which makes the planted-recovery property hold by construction.
"""

from __future__ import annotations

import csv
import datetime as dt
import random
import string
from dataclasses import dataclass
from pathlib import Path

from .corpus import CONDITION_MARKS, SurveyRecord, load_vocabulary
from .embedding import EmbeddingProviderConfig, cosine, embed_batch
from .errors import PipelineError
from .extraction import extract_all, load_clue_table
from . import default_clues_en, default_topics

DEFAULT_SEED = 7
DEFAULT_RECORDS = 240
DEFAULT_PLANTED = 6
DEFAULT_MONTH_COUNT = 24
FIRST_MONTH = (2021, 1)
SAFETY_MARGIN = 0.45  # non-planted similarities must stay below this


@dataclass(frozen=True)
class PlantedLink:
    front_topic: str
    rear_topic: str
    front_date: dt.date
    rear_date: dt.date
    marker: str


@dataclass
class SyntheticCorpus:
    rows: list[tuple[str, str, str, str]]  # date, topic, condition, text
    planted: list[PlantedLink]
    di_rows: list[tuple[str, int, int, int]]  # month, leading, coincident, lagging

    def write(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        with (directory / "corpus.csv").open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["date", "topic", "condition", "text"])
            writer.writerows(self.rows)
        with (directory / "di.csv").open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["month", "leading", "coincident", "lagging"])
            writer.writerows(self.di_rows)


def _months(count: int) -> list[tuple[int, int]]:
    year, month = FIRST_MONTH
    out = []
    for _ in range(count):
        out.append((year, month))
        month += 1
        if month > 12:
            year, month = year + 1, 1
    return out


def _word(rng: random.Random) -> str:
    return "".join(rng.choice(string.ascii_lowercase) for _ in range(rng.randint(5, 9)))


def _phrase(rng: random.Random, words: int) -> str:
    return " ".join(_word(rng) for _ in range(words))


def _build_attempt(
    rng: random.Random,
    topics: tuple[str, ...],
    record_count: int,
    planted_count: int,
    month_count: int,
) -> SyntheticCorpus:
    months = _months(month_count)
    marks = list(CONDITION_MARKS) + [""]

    planted: list[PlantedLink] = []
    rows: list[tuple[str, str, str, str]] = []
    for i in range(planted_count):
        front_topic = topics[i % len(topics)]
        rear_topic = topics[(i + 4) % len(topics)]
        fy, fm = months[(2 * i) % (month_count - 3)]
        ry, rm = months[(2 * i) % (month_count - 3) + 3]
        front_date = dt.date(fy, fm, rng.randint(1, 28))
        rear_date = dt.date(ry, rm, rng.randint(1, 28))
        marker = _phrase(rng, 3)
        planted.append(PlantedLink(front_topic, rear_topic, front_date, rear_date, marker))
        rows.append(
            (
                front_date.isoformat(),
                front_topic,
                rng.choice(marks),
                f"Due to {_phrase(rng, 2)}, {marker}.",
            )
        )
        rows.append(
            (
                rear_date.isoformat(),
                rear_topic,
                rng.choice(marks),
                f"Due to {marker}, {_phrase(rng, 2)}.",
            )
        )

    filler_count = record_count - len(rows)
    for i in range(filler_count):
        topic = topics[i % len(topics)]
        year, month = months[rng.randrange(month_count)]
        date = dt.date(year, month, rng.randint(1, 28))
        if rng.random() < 0.6:
            text = f"Due to {_phrase(rng, rng.randint(2, 3))}, {_phrase(rng, rng.randint(2, 4))}."
        else:
            text = f"{_phrase(rng, rng.randint(4, 7))}."
        rows.append((date.isoformat(), topic, rng.choice(marks), text))

    rng.shuffle(rows)

    di_rows: list[tuple[str, int, int, int]] = []
    levels = [55, 52, 48]
    for year, month in months:
        levels = [max(20, min(80, level + rng.randint(-6, 6))) for level in levels]
        di_rows.append((f"{year:04d}-{month:02d}", levels[0], levels[1], levels[2]))

    return SyntheticCorpus(rows=rows, planted=planted, di_rows=di_rows)


def _records_from_rows(rows: list[tuple[str, str, str, str]]) -> list[SurveyRecord]:
    records = []
    for i, (date, topic, _, text) in enumerate(rows, start=1):
        records.append(
            SurveyRecord(
                id=i, date=dt.date.fromisoformat(date), topic=topic, condition=None, text=text
            )
        )
    return records


def _attempt_is_clean(corpus: SyntheticCorpus) -> bool:
    """Brute-force every cross-topic, date-ordered candidate link.

    Clean means: each planted link appears with similarity 1.0, and
    every other candidate stays below the safety margin.
    """
    clues = load_clue_table(default_clues_en())
    pairs = extract_all(_records_from_rows(corpus.rows), clues)
    texts = [p.cause for p in pairs] + [p.effect for p in pairs]
    vectors = embed_batch(texts, EmbeddingProviderConfig())
    cause_vecs = vectors[: len(pairs)]
    effect_vecs = vectors[len(pairs) :]

    planted_keys = {
        (link.front_topic, link.rear_topic, link.front_date, link.rear_date, link.marker)
        for link in corpus.planted
    }
    found_planted = set()
    for i, front in enumerate(pairs):
        for j, rear in enumerate(pairs):
            if front.topic == rear.topic or front.date >= rear.date:
                continue
            similarity = cosine(effect_vecs[i], cause_vecs[j])
            key = (front.topic, rear.topic, front.date, rear.date, rear.cause)
            if key in planted_keys and front.effect == rear.cause:
                if similarity != 1.0:
                    return False
                found_planted.add(key)
            elif similarity >= SAFETY_MARGIN:
                return False
    return found_planted == planted_keys


def generate(
    seed: int = DEFAULT_SEED,
    record_count: int = DEFAULT_RECORDS,
    planted_count: int = DEFAULT_PLANTED,
    month_count: int = DEFAULT_MONTH_COUNT,
    max_attempts: int = 50,
) -> SyntheticCorpus:
    """Generate a verified synthetic corpus; deterministic for fixed arguments."""
    vocabulary = load_vocabulary(default_topics())
    for attempt in range(max_attempts):
        rng = random.Random(f"{seed}:{attempt}")
        corpus = _build_attempt(
            rng, vocabulary.topics, record_count, planted_count, month_count
        )
        if _attempt_is_clean(corpus):
            return corpus
    raise PipelineError(f"no clean synthetic corpus found in {max_attempts} attempts")
