"""Diffusion-index ingestion, cumulative variants, Pearson correlation.

Six DI variants exist: leading / coincident / lagging, plus their
cumulative forms (running sum of the monthly value minus 50). Narrative
series are correlated against each variant over the intersection of
their months; no interpolation. Zero-variance or under-two-month
overlaps make a cell undefined -- it is flagged, never coerced to 0.

Both Pearson and z-normalization use the population (n) convention.
"""

from __future__ import annotations

import csv
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .corpus import TopicVocabulary
from .errors import InputError, PipelineError
from .indexing import MonthlyIndexSeries
from .months import index_to_month, month_index


class DIKind(enum.Enum):
    LEADING = "leading"
    COINCIDENT = "coincident"
    LAGGING = "lagging"
    CUMULATIVE_LEADING = "cumulative_leading"
    CUMULATIVE_COINCIDENT = "cumulative_coincident"
    CUMULATIVE_LAGGING = "cumulative_lagging"

    @property
    def is_cumulative(self) -> bool:
        return self.value.startswith("cumulative_")

    @property
    def cumulative_kind(self) -> "DIKind":
        if self.is_cumulative:
            raise InputError(f"{self.value} is already cumulative")
        return DIKind(f"cumulative_{self.value}")


class CorrelationUndefined(PipelineError):
    """Pearson has no defined value for this input pair."""


class InsufficientOverlapError(CorrelationUndefined):
    """Fewer than two months shared between the series."""


class ZeroVarianceError(CorrelationUndefined):
    """One side is constant on the overlap."""


@dataclass(frozen=True)
class DISeries:
    kind: DIKind
    values: dict[str, float]


@dataclass(frozen=True)
class CorrelationMatrix:
    """Pearson grid: rows are front topics, columns are rear topics.

    Cells exist for every ordered pair of distinct topics; an undefined
    correlation is stored as None. The diagonal is absent.
    """

    di_kind: DIKind
    topics: tuple[str, ...]
    cells: dict[tuple[str, str], float | None]

    def defined_cells(self) -> dict[tuple[str, str], float]:
        return {pair: v for pair, v in self.cells.items() if v is not None}


def load_di(path: str | Path) -> tuple[DISeries, DISeries, DISeries]:
    """Read leading/coincident/lagging DI values from one CSV.

    Months must be consecutive (a gap raises, naming the missing month)
    and every value must lie in [0, 100].
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"DI file not found: {path}")
    header_expected = ["month", "leading", "coincident", "lagging"]
    columns: dict[str, dict[str, float]] = {k: {} for k in header_expected[1:]}
    previous_month: str | None = None
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != header_expected:
            raise InputError(f"{path}: bad header {header!r}, expected {header_expected}")
        for row_no, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise InputError(f"{path}:{row_no}: expected 4 columns, got {len(row)}")
            month = row[0].strip()
            idx = month_index(month)
            if previous_month is not None:
                gap = idx - month_index(previous_month)
                if gap <= 0:
                    raise InputError(f"{path}:{row_no}: months not strictly increasing at {month}")
                if gap > 1:
                    missing = index_to_month(month_index(previous_month) + 1)
                    raise InputError(f"{path}:{row_no}: missing month {missing}")
            previous_month = month
            for name, cell in zip(header_expected[1:], row[1:]):
                try:
                    value = float(cell)
                except ValueError:
                    raise InputError(f"{path}:{row_no}: bad {name} value {cell!r}") from None
                if not 0.0 <= value <= 100.0:
                    raise InputError(
                        f"{path}:{row_no}: {name} value {value} outside [0, 100]"
                    )
                columns[name][month] = value
    return (
        DISeries(DIKind.LEADING, columns["leading"]),
        DISeries(DIKind.COINCIDENT, columns["coincident"]),
        DISeries(DIKind.LAGGING, columns["lagging"]),
    )


def cumulative(di: DISeries) -> DISeries:
    """Running sum of (value - 50), month by month."""
    if di.kind.is_cumulative:
        raise InputError(f"series is already cumulative ({di.kind.value})")
    running = 0.0
    values: dict[str, float] = {}
    for month, value in di.values.items():
        running += value - 50.0
        values[month] = running
    return DISeries(di.kind.cumulative_kind, values)


def six_di_variants(
    leading: DISeries, coincident: DISeries, lagging: DISeries
) -> list[DISeries]:
    base = [leading, coincident, lagging]
    return base + [cumulative(s) for s in base]


def pearson(x: dict[str, float], y: dict[str, float]) -> float:
    """Pearson r over the intersection of months, clamped to [-1, 1]."""
    overlap = sorted(set(x) & set(y))
    if len(overlap) < 2:
        raise InsufficientOverlapError(
            f"need at least 2 overlapping months, got {len(overlap)}"
        )
    xs = [x[m] for m in overlap]
    ys = [y[m] for m in overlap]
    if all(v == xs[0] for v in xs) or all(v == ys[0] for v in ys):
        raise ZeroVarianceError("one series is constant on the overlap")
    n = len(overlap)
    mean_x = math.fsum(xs) / n
    mean_y = math.fsum(ys) / n
    cov = math.fsum((xi - mean_x) * (yi - mean_y) for xi, yi in zip(xs, ys))
    var_x = math.fsum((xi - mean_x) ** 2 for xi in xs)
    var_y = math.fsum((yi - mean_y) ** 2 for yi in ys)
    if var_x == 0.0 or var_y == 0.0:
        raise ZeroVarianceError("one series is constant on the overlap")
    r = cov / (math.sqrt(var_x) * math.sqrt(var_y))
    return max(-1.0, min(1.0, r))


def correlate_all(
    series: list[MonthlyIndexSeries],
    di_variants: list[DISeries],
    vocabulary: TopicVocabulary,
    workers: int = 1,
) -> list[CorrelationMatrix]:
    """One matrix per DI variant; undefined cells become None, never 0."""
    by_pair = {s.topic_pair: s for s in series}

    def cell(args: tuple[DISeries, tuple[str, str]]) -> float | None:
        di, pair = args
        narrative = by_pair.get(pair)
        if narrative is None:
            return None
        try:
            return pearson(narrative.values, di.values)
        except CorrelationUndefined:
            return None

    matrices: list[CorrelationMatrix] = []
    ordered_pairs = vocabulary.ordered_pairs()
    for di in di_variants:
        tasks = [(di, pair) for pair in ordered_pairs]
        if workers > 1 and len(tasks) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(cell, tasks))
        else:
            results = [cell(task) for task in tasks]
        matrices.append(
            CorrelationMatrix(
                di_kind=di.kind,
                topics=vocabulary.topics,
                cells=dict(zip(ordered_pairs, results)),
            )
        )
    return matrices


def znormalize(series: dict[str, float]) -> dict[str, float]:
    """Shift/scale to mean 0, population standard deviation 1."""
    values = list(series.values())
    if len(values) < 2 or all(v == values[0] for v in values):
        raise ZeroVarianceError("cannot z-normalize a constant series")
    n = len(values)
    mean = math.fsum(values) / n
    sd = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / n)
    if sd == 0.0:
        raise ZeroVarianceError("cannot z-normalize a constant series")
    return {month: (value - mean) / sd for month, value in series.items()}


def write_correlation_csv(matrix: CorrelationMatrix, path: str | Path) -> None:
    """Rows = front topics, columns = rear topics, empty cell = diagonal/undefined."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([""] + list(matrix.topics))
        for front in matrix.topics:
            row: list[str] = [front]
            for rear in matrix.topics:
                if front == rear:
                    row.append("")
                else:
                    value = matrix.cells.get((front, rear))
                    row.append("" if value is None else repr(value))
            writer.writerow(row)


def read_correlation_csv(path: str | Path, kind: DIKind) -> CorrelationMatrix:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"correlation file not found: {path}")
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "":
            raise InputError(f"{path}: bad header; first cell must be empty")
        topics = tuple(header[1:])
        cells: dict[tuple[str, str], float | None] = {}
        rows = list(reader)
    if len(rows) != len(topics):
        raise InputError(f"{path}: expected {len(topics)} rows, got {len(rows)}")
    for row, front in zip(rows, topics):
        if len(row) != len(topics) + 1 or row[0] != front:
            raise InputError(f"{path}: malformed row for front topic {front!r}")
        for rear, cell in zip(topics, row[1:]):
            if front == rear:
                continue
            cells[(front, rear)] = float(cell) if cell else None
    return CorrelationMatrix(di_kind=kind, topics=topics, cells=cells)
