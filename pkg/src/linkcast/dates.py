"""Calendar helpers.

All timestamps in the toolkit are integer day offsets from the network
epoch, day 0 = 1994-01-01.  Snapshot dates are anchored to calendar dates
(year-end splits, year lookbacks), so conversions go through the Gregorian
calendar rather than fixed 365-day years.
"""

from __future__ import annotations

import datetime

EPOCH = datetime.date(1994, 1, 1)

#: First day of the "recent edges" sub-network window (2000-01-01).
SINCE_2000_DAY = (datetime.date(2000, 1, 1) - EPOCH).days


def day_of(date: datetime.date | str) -> int:
    """Return the day offset of a date (ISO string or ``datetime.date``)."""
    if isinstance(date, str):
        date = datetime.date.fromisoformat(date)
    return (date - EPOCH).days


def date_of(day: int) -> datetime.date:
    """Return the calendar date of a day offset."""
    return EPOCH + datetime.timedelta(days=int(day))


def years_before(day: int, years: int) -> int:
    """Day offset of the same calendar month/day, ``years`` years earlier.

    Feb 29 maps to Feb 28 when the target year is not a leap year.
    """
    d = date_of(day)
    try:
        shifted = d.replace(year=d.year - years)
    except ValueError:  # Feb 29 in a non-leap target year
        shifted = d.replace(year=d.year - years, day=28)
    return day_of(shifted)


def parse_day(text: str | int) -> int:
    """Parse a day offset given either as an integer or an ISO date."""
    if isinstance(text, int):
        return text
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        return day_of(text)
