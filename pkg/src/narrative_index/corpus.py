"""Survey corpus ingestion.

A corpus file is UTF-8 CSV with header ``date,topic,condition,text``
(RFC 4180 quoting, so explanation texts may contain commas and
newlines). Dates come as ``YYYY-MM-DD`` or as ``YYYY-MM``, the latter
normalized to the first of the month. The condition column carries one
of the five survey marks or is empty.
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InputError

EXPECTED_HEADER = ["date", "topic", "condition", "text"]


class Condition(enum.Enum):
    MUCH_BETTER = "much-better"
    BETTER = "better"
    UNCHANGED = "unchanged"
    WORSE = "worse"
    MUCH_WORSE = "much-worse"


# Survey marks, best to worst.
CONDITION_MARKS = {
    "◎": Condition.MUCH_BETTER,
    "○": Condition.BETTER,
    "□": Condition.UNCHANGED,
    "▲": Condition.WORSE,
    "×": Condition.MUCH_WORSE,
}

_FULL_DATE_RE = re.compile(r"^(\d{4})-(\d{2})-(\d{2})$")
_MONTH_DATE_RE = re.compile(r"^(\d{4})-(\d{2})$")


@dataclass(frozen=True)
class TopicVocabulary:
    """Ordered topic names; the order fixes row/column order everywhere downstream."""

    topics: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.topics)) != len(self.topics):
            dupes = sorted({t for t in self.topics if self.topics.count(t) > 1})
            raise InputError(f"duplicate topics in vocabulary: {dupes}")
        if not self.topics:
            raise InputError("topic vocabulary is empty")

    def __contains__(self, topic: str) -> bool:
        return topic in self.topics

    def ordered_pairs(self) -> list[tuple[str, str]]:
        """All ordered (front, rear) pairs of distinct topics, canonical order."""
        return [(a, b) for a in self.topics for b in self.topics if a != b]


@dataclass(frozen=True)
class SurveyRecord:
    id: int
    date: dt.date
    topic: str
    condition: Condition | None
    text: str


@dataclass
class CorpusLoad:
    """Loaded records plus exact accounting of rows skipped in lenient mode."""

    records: list[SurveyRecord]
    skipped: list[tuple[int, str]] = field(default_factory=list)

    @property
    def skipped_count(self) -> int:
        return len(self.skipped)


def load_vocabulary(path: str | Path) -> TopicVocabulary:
    """Read a topic vocabulary: one topic per line, order significant, blanks ignored."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"topic vocabulary not found: {path}")
    topics = [line.strip() for line in path.read_text(encoding="utf-8").splitlines()]
    return TopicVocabulary(tuple(t for t in topics if t))


def parse_record_date(raw: str) -> dt.date:
    raw = raw.strip()
    m = _FULL_DATE_RE.match(raw)
    if m:
        try:
            return dt.date(int(m.group(1)), int(m.group(2)), int(m.group(3)))
        except ValueError as exc:
            raise InputError(f"invalid date {raw!r}: {exc}") from None
    m = _MONTH_DATE_RE.match(raw)
    if m:
        try:
            return dt.date(int(m.group(1)), int(m.group(2)), 1)
        except ValueError as exc:
            raise InputError(f"invalid date {raw!r}: {exc}") from None
    raise InputError(f"invalid date {raw!r}; expected YYYY-MM-DD or YYYY-MM")


def parse_condition(raw: str) -> Condition | None:
    raw = raw.strip()
    if not raw:
        return None
    if raw not in CONDITION_MARKS:
        raise InputError(f"unknown condition mark {raw!r}; expected one of ◎ ○ □ ▲ ×")
    return CONDITION_MARKS[raw]


def load_corpus(
    path: str | Path,
    vocabulary: TopicVocabulary,
    strict: bool = True,
) -> CorpusLoad:
    """Load survey records from a corpus CSV.

    Record ids are assigned sequentially from 1 in input order, so
    identical file bytes always produce the identical record list.
    Rows whose topic is not in the vocabulary raise in strict mode and
    are skipped (with the row number and reason recorded) in lenient
    mode. Duplicate rows are kept: distinct respondents may submit
    identical text.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"corpus file not found: {path}")

    records: list[SurveyRecord] = []
    skipped: list[tuple[int, str]] = []
    next_id = 1
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file, expected header {EXPECTED_HEADER}") from None
        if [h.strip() for h in header] != EXPECTED_HEADER:
            raise InputError(f"{path}: bad header {header!r}, expected {EXPECTED_HEADER}")
        for row_no, row in enumerate(reader, start=2):
            if len(row) != len(EXPECTED_HEADER):
                raise InputError(
                    f"{path}:{row_no}: expected {len(EXPECTED_HEADER)} columns, got {len(row)}"
                )
            raw_date, raw_topic, raw_condition, raw_text = row
            topic = raw_topic.strip()
            if topic not in vocabulary:
                if strict:
                    raise InputError(f"{path}:{row_no}: unknown topic {topic!r}")
                skipped.append((row_no, f"unknown topic {topic!r}"))
                continue
            text = raw_text.strip()
            if not text:
                raise InputError(f"{path}:{row_no}: empty explanation text")
            records.append(
                SurveyRecord(
                    id=next_id,
                    date=parse_record_date(raw_date),
                    topic=topic,
                    condition=parse_condition(raw_condition),
                    text=text,
                )
            )
            next_id += 1
    return CorpusLoad(records=records, skipped=skipped)
