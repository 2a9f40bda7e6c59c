"""Clue-expression matching: split sentences into cause / effect expressions.

Matching is literal substring search, no morphology. Each sentence
yields at most one pair, decided by clue priority (lower first) with
the leftmost match position as tie-break. Two placements exist:

* ``infix``  -- the clue separates cause (before) from effect (after).
  If the clue opens the sentence ("Due to X, Y"), the cause is the span
  between the clue and the first comma and the effect is the remainder.
* ``leading`` -- sentence-initial anaphoric connectives ("For this
  reason, ..."): the cause is the whole preceding sentence of the same
  record, the effect is the remainder of the current sentence.

Expressions are trimmed of surrounding whitespace and dangling
punctuation; a pair with an empty side, or whose clue surface survives
inside either side, is discarded rather than emitted in violation of
its invariants.
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
from dataclasses import dataclass
from pathlib import Path

from .corpus import SurveyRecord
from .errors import InputError

# Terminators that always end a sentence (full width)...
_FULLWIDTH_TERMINATORS = "。．！？"
# ...and ones that end a sentence only before whitespace or end of text.
_ASCII_TERMINATORS = ".!?"

_COMMAS = ",、，"
_TRIM_CHARS = " \t\r\n　" + _FULLWIDTH_TERMINATORS + _ASCII_TERMINATORS + _COMMAS + ":：;；"


class Placement(enum.Enum):
    INFIX = "infix"
    LEADING = "leading"


@dataclass(frozen=True)
class CluePattern:
    surface: str
    placement: Placement
    priority: int

    def __post_init__(self) -> None:
        if not self.surface:
            raise InputError("clue surface must be non-empty")


@dataclass(frozen=True)
class CausalPair:
    id: int
    record_id: int
    topic: str
    date: dt.date
    cause: str
    effect: str
    clue: str


def load_clue_table(path: str | Path) -> list[CluePattern]:
    """Read a clue table: UTF-8 TSV ``surface<TAB>placement<TAB>priority``.

    Blank lines and lines starting with ``#`` are ignored. Priorities
    must be unique within the table.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"clue table not found: {path}")
    clues: list[CluePattern] = []
    seen_priorities: dict[int, str] = {}
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise InputError(f"{path}:{line_no}: expected 3 tab-separated columns")
        surface, raw_placement, raw_priority = parts
        try:
            placement = Placement(raw_placement.strip())
        except ValueError:
            raise InputError(
                f"{path}:{line_no}: placement must be 'infix' or 'leading', got {raw_placement!r}"
            ) from None
        try:
            priority = int(raw_priority.strip())
        except ValueError:
            raise InputError(f"{path}:{line_no}: priority must be an integer") from None
        if priority in seen_priorities:
            raise InputError(
                f"{path}:{line_no}: priority {priority} already used by {seen_priorities[priority]!r}"
            )
        seen_priorities[priority] = surface
        clues.append(CluePattern(surface=surface, placement=placement, priority=priority))
    if not clues:
        raise InputError(f"{path}: clue table is empty")
    return clues


def split_sentences(text: str) -> list[str]:
    """Split text into sentences, keeping terminators.

    Full-width terminators end a sentence unconditionally; ASCII ``.``,
    ``!``, ``?`` end one only when followed by whitespace or the end of
    the text (so "3.5" stays intact). Whitespace separating sentences is
    dropped, everything else is preserved: the concatenation of the
    returned sentences equals the input minus inter-sentence whitespace.
    """
    sentences: list[str] = []
    n = len(text)
    start = 0
    i = 0
    while i < n:
        ch = text[i]
        is_break = ch in _FULLWIDTH_TERMINATORS or (
            ch in _ASCII_TERMINATORS and (i + 1 == n or text[i + 1].isspace())
        )
        if is_break:
            sentences.append(text[start : i + 1])
            i += 1
            while i < n and text[i].isspace():
                i += 1
            start = i
        else:
            i += 1
    if start < n:
        sentences.append(text[start:])
    return sentences


def _trim(expression: str) -> str:
    return expression.strip(_TRIM_CHARS)


def _find_match(sentence: str, clue: CluePattern) -> int | None:
    """Position of the clue in the sentence, or None.

    Leading clues match only at the start of the sentence (after
    leading whitespace); infix clues match anywhere.
    """
    if clue.placement is Placement.LEADING:
        stripped = sentence.lstrip()
        if stripped.startswith(clue.surface):
            return len(sentence) - len(stripped)
        return None
    pos = sentence.find(clue.surface)
    return pos if pos >= 0 else None


def _split_expressions(
    sentences: list[str], sentence_idx: int, clue: CluePattern, pos: int
) -> tuple[str, str] | None:
    sentence = sentences[sentence_idx]
    after = sentence[pos + len(clue.surface) :]
    if clue.placement is Placement.LEADING:
        if sentence_idx == 0:
            return None
        return sentences[sentence_idx - 1], after
    if sentence[:pos].strip() == "":
        # Sentence-initial infix clue: "Due to X, Y" -- the cause runs to
        # the first comma, the effect is the rest.
        comma_positions = [after.find(c) for c in _COMMAS if after.find(c) >= 0]
        if not comma_positions:
            return None
        comma = min(comma_positions)
        return after[:comma], after[comma + 1 :]
    return sentence[:pos], after


def extract_pairs(
    record: SurveyRecord, clues: list[CluePattern], id_start: int = 1
) -> list[CausalPair]:
    """Extract cause/effect pairs from one record.

    Pure function of (record, clue table): ids are assigned
    sequentially from ``id_start`` in sentence order, so reruns yield
    identical pairs.
    """
    if not clues:
        raise InputError("clue table is empty")
    sentences = split_sentences(record.text)
    pairs: list[CausalPair] = []
    next_id = id_start
    for idx in range(len(sentences)):
        best: tuple[int, int, CluePattern] | None = None
        for clue in clues:
            pos = _find_match(sentences[idx], clue)
            if pos is None:
                continue
            if best is None or (clue.priority, pos) < (best[0], best[1]):
                best = (clue.priority, pos, clue)
        if best is None:
            continue
        _, pos, clue = best
        split = _split_expressions(sentences, idx, clue, pos)
        if split is None:
            continue
        cause, effect = _trim(split[0]), _trim(split[1])
        if not cause or not effect:
            continue
        if clue.surface in cause or clue.surface in effect:
            continue
        pairs.append(
            CausalPair(
                id=next_id,
                record_id=record.id,
                topic=record.topic,
                date=record.date,
                cause=cause,
                effect=effect,
                clue=clue.surface,
            )
        )
        next_id += 1
    return pairs


def extract_all(records: list[SurveyRecord], clues: list[CluePattern]) -> list[CausalPair]:
    """Extract pairs from every record, ids sequential in (record, sentence) order."""
    pairs: list[CausalPair] = []
    next_id = 1
    for record in records:
        got = extract_pairs(record, clues, id_start=next_id)
        pairs.extend(got)
        next_id += len(got)
    return pairs


PAIRS_HEADER = ["pair_id", "record_id", "date", "topic", "clue", "cause", "effect"]


def write_pairs_csv(pairs: list[CausalPair], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PAIRS_HEADER)
        for p in pairs:
            writer.writerow(
                [p.id, p.record_id, p.date.isoformat(), p.topic, p.clue, p.cause, p.effect]
            )


def read_pairs_csv(path: str | Path) -> list[CausalPair]:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"pairs file not found: {path}")
    pairs: list[CausalPair] = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != PAIRS_HEADER:
            raise InputError(f"{path}: bad header {header!r}, expected {PAIRS_HEADER}")
        for row_no, row in enumerate(reader, start=2):
            if len(row) != len(PAIRS_HEADER):
                raise InputError(f"{path}:{row_no}: expected {len(PAIRS_HEADER)} columns")
            pair_id, record_id, date, topic, clue, cause, effect = row
            try:
                pairs.append(
                    CausalPair(
                        id=int(pair_id),
                        record_id=int(record_id),
                        date=dt.date.fromisoformat(date),
                        topic=topic,
                        cause=cause,
                        effect=effect,
                        clue=clue,
                    )
                )
            except ValueError as exc:
                raise InputError(f"{path}:{row_no}: {exc}") from None
    return pairs
