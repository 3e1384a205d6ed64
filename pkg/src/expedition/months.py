"""Calendar-month arithmetic.

Every temporal aggregate in the engine is bucketed by calendar month,
written as an ISO "YYYY-MM" string.  Strings of that shape sort in
calendar order, so they double as dictionary keys and axis labels.
"""

from __future__ import annotations

import re
from datetime import date

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")

MONTH_NAMES = [
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
]


def is_month(s: str) -> bool:
    m = _MONTH_RE.match(s)
    return bool(m) and 1 <= int(m.group(2)) <= 12


def month_index(month: str) -> int:
    """Map "YYYY-MM" to a linear month count (useful for ranges)."""
    m = _MONTH_RE.match(month)
    if not m or not 1 <= int(m.group(2)) <= 12:
        raise ValueError(f"not a calendar month: {month!r}")
    return int(m.group(1)) * 12 + int(m.group(2)) - 1


def month_str(index: int) -> str:
    year, mon = divmod(index, 12)
    return f"{year:04d}-{mon + 1:02d}"


def date_to_month(d: date) -> str:
    return f"{d.year:04d}-{d.month:02d}"


def month_range(start: str, end: str) -> list[str]:
    """All months from start to end, inclusive."""
    a, b = month_index(start), month_index(end)
    if a > b:
        raise ValueError(f"interval start {start} after end {end}")
    return [month_str(i) for i in range(a, b + 1)]


def clip_interval(
    interval: tuple[str, str], span: tuple[str, str]
) -> tuple[str, str] | None:
    """Intersect a month interval with a span; None when disjoint."""
    lo = max(month_index(interval[0]), month_index(span[0]))
    hi = min(month_index(interval[1]), month_index(span[1]))
    if lo > hi:
        return None
    return month_str(lo), month_str(hi)


def parse_interval(text: str) -> tuple[str, str]:
    """Parse "YYYY-MM..YYYY-MM" (a single month may omit the right side)."""
    parts = text.split("..")
    if len(parts) == 1:
        start = end = parts[0]
    elif len(parts) == 2:
        start, end = parts
    else:
        raise ValueError(f"bad interval: {text!r}")
    if not is_month(start) or not is_month(end):
        raise ValueError(f"bad interval: {text!r}")
    if month_index(start) > month_index(end):
        raise ValueError(f"interval start after end: {text!r}")
    return start, end
