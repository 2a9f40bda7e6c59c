"""Month ("YYYY-MM") arithmetic used by the index and analytics stages."""

from __future__ import annotations

import datetime as dt
import re

from .errors import InputError

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")

# Mean Gregorian month length in days; used to floor day lags into month lags.
DAYS_PER_MONTH = 30.4375


def month_of(date: dt.date) -> str:
    return f"{date.year:04d}-{date.month:02d}"


def month_index(month: str) -> int:
    """Absolute month number since year 0, for gap-free ordering."""
    m = _MONTH_RE.match(month)
    if m is None:
        raise InputError(f"invalid month {month!r}; expected YYYY-MM")
    year, mon = int(m.group(1)), int(m.group(2))
    if not 1 <= mon <= 12:
        raise InputError(f"invalid month {month!r}; month part out of range")
    return year * 12 + (mon - 1)


def index_to_month(idx: int) -> str:
    return f"{idx // 12:04d}-{idx % 12 + 1:02d}"


def month_range(first: str, last: str) -> list[str]:
    """All months from first to last, inclusive."""
    lo, hi = month_index(first), month_index(last)
    if hi < lo:
        raise InputError(f"month range {first}..{last} runs backwards")
    return [index_to_month(i) for i in range(lo, hi + 1)]


def month_lag(front: str, rear: str) -> int:
    """Calendar-month difference rear minus front."""
    return month_index(rear) - month_index(front)
