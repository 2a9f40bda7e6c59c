"""Monthly narrative index per ordered topic pair.

Each chain contributes decay_weight(lag) * similarity to the month its
rear (result) event falls in; a month's index is the sum of its
contributions. The decay weight is the logistic tail 1 / (1 + a*e^(b*d)).

The lag unit defaults to months: the decay constants (a=0.02, b=0.065)
give a half-life of ~60.8 month-lags, i.e. about five years, whereas
the same constants on day lags halve in ~61 days. Day lags remain
selectable; the run manifest documents whichever unit was used.
"""

from __future__ import annotations

import csv
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .chains import CausalChain
from .corpus import TopicVocabulary
from .errors import ConfigError, InputError
from .months import DAYS_PER_MONTH, month_range

DEFAULT_DECAY_A = 0.02
DEFAULT_DECAY_B = 0.065


class LagUnit(enum.Enum):
    MONTHS = "months"
    DAYS = "days"


@dataclass(frozen=True)
class DecayParams:
    a: float = DEFAULT_DECAY_A
    b: float = DEFAULT_DECAY_B
    lag_unit: LagUnit = LagUnit.MONTHS

    def __post_init__(self) -> None:
        if self.a <= 0.0:
            raise ConfigError(f"decay parameter a must be positive, got {self.a}")
        if self.b <= 0.0:
            raise ConfigError(f"decay parameter b must be positive, got {self.b}")


@dataclass(frozen=True)
class MonthlyIndexSeries:
    topic_pair: tuple[str, str]
    values: dict[str, float]

    def column_name(self) -> str:
        return f"{self.topic_pair[0]}->{self.topic_pair[1]}"


def decay_weight(d: float, params: DecayParams) -> float:
    """1 / (1 + a*e^(b*d)): strictly decreasing, range (0, 1/(1+a)]."""
    if d < 0:
        raise InputError(f"lag must be non-negative, got {d}")
    return 1.0 / (1.0 + params.a * math.exp(params.b * d))


def chain_lag(chain: CausalChain, params: DecayParams) -> int:
    """Chain lag in the configured unit; month lags floor the day count."""
    if chain.lag_days <= 0:
        raise InputError(
            f"chain {chain.front}->{chain.rear} has non-positive lag {chain.lag_days}; "
            "upstream invariant violated"
        )
    if params.lag_unit is LagUnit.DAYS:
        return chain.lag_days
    return int(chain.lag_days / DAYS_PER_MONTH)


def _neumaier_sum(values: list[float]) -> float:
    total = 0.0
    compensation = 0.0
    for value in values:
        t = total + value
        if abs(total) >= abs(value):
            compensation += (total - t) + value
        else:
            compensation += (value - t) + total
        total = t
    return total + compensation


def monthly_index(
    chains: list[CausalChain],
    params: DecayParams,
    topic_pair: tuple[str, str],
    months: list[str] | None = None,
) -> MonthlyIndexSeries:
    """Sum decayed similarities into the rear-event month.

    ``months`` fixes the series span (absent months become 0); when
    omitted the span is the rear-month range of the chains themselves.
    Accumulation is compensated, so the result is stable under chain
    permutation to well below 1e-12.
    """
    for chain in chains:
        if chain.topic_pair != topic_pair:
            raise InputError(
                f"chain {chain.front}->{chain.rear} belongs to {chain.topic_pair}, "
                f"not {topic_pair}"
            )
    terms: dict[str, list[float]] = {}
    for chain in chains:
        weight = decay_weight(chain_lag(chain, params), params)
        terms.setdefault(chain.rear_month, []).append(weight * chain.similarity)

    if months is None:
        if terms:
            observed = sorted(terms)
            months = month_range(observed[0], observed[-1])
        else:
            months = []
    values = {month: _neumaier_sum(sorted(terms.get(month, []))) for month in months}
    return MonthlyIndexSeries(topic_pair=topic_pair, values=values)


def build_all_series(
    chains: list[CausalChain],
    vocabulary: TopicVocabulary,
    params: DecayParams,
    months: list[str] | None = None,
    workers: int = 1,
) -> list[MonthlyIndexSeries]:
    """One series per ordered topic pair, T*(T-1) in canonical vocabulary order.

    ``months`` should be the corpus's full month range; when omitted it
    falls back to the rear-month span of the chains.
    """
    if months is None and chains:
        rear_months = sorted(c.rear_month for c in chains)
        months = month_range(rear_months[0], rear_months[-1])
    by_pair: dict[tuple[str, str], list[CausalChain]] = {}
    for chain in chains:
        by_pair.setdefault(chain.topic_pair, []).append(chain)

    ordered_pairs = vocabulary.ordered_pairs()

    def run(pair: tuple[str, str]) -> MonthlyIndexSeries:
        return monthly_index(by_pair.get(pair, []), params, pair, months=months or [])

    if workers > 1 and len(ordered_pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, ordered_pairs))
    return [run(pair) for pair in ordered_pairs]


def write_indices_csv(series: list[MonthlyIndexSeries], path: str | Path) -> None:
    """First column `month`, then one column per ordered topic pair."""
    months: list[str] = []
    if series:
        months = list(series[0].values)
        for s in series:
            if list(s.values) != months:
                raise InputError("all series must share one month range")
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["month"] + [s.column_name() for s in series])
        for month in months:
            writer.writerow([month] + [repr(s.values[month]) for s in series])


def read_indices_csv(path: str | Path) -> list[MonthlyIndexSeries]:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"indices file not found: {path}")
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "month":
            raise InputError(f"{path}: bad header; first column must be 'month'")
        pairs: list[tuple[str, str]] = []
        for column in header[1:]:
            front, sep, rear = column.partition("->")
            if not sep or not front or not rear:
                raise InputError(f"{path}: bad series column {column!r}")
            pairs.append((front, rear))
        values: list[dict[str, float]] = [{} for _ in pairs]
        for row_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise InputError(f"{path}:{row_no}: expected {len(header)} columns")
            month = row[0]
            for i, cell in enumerate(row[1:]):
                try:
                    values[i][month] = float(cell)
                except ValueError:
                    raise InputError(f"{path}:{row_no}: bad value {cell!r}") from None
    return [
        MonthlyIndexSeries(topic_pair=pair, values=vals) for pair, vals in zip(pairs, values)
    ]
