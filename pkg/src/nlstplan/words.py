"""Shared lexicons: stop words, operator keywords, number and time words.

The stop-word list is fixed and shipped with the package so tagging is
reproducible across installs.
"""

from __future__ import annotations

# Function words removed before information spans are formed.
STOPWORDS = frozenset("""
a an the is are was were be been being do does did has have had what which
who whose where when how there that this these those to at on in by for from
with and or not no as it its their they them all each every any some most
more much least me my we us you your i show find list give get tell display
please can could would will than so about away around during between within
inside
""".split())

# Connectives kept inside a span ("city of london") but never entities.
SOFT_WORDS = frozenset({"of"})

NN_KEYWORDS = frozenset({"nearest", "closest", "neighbor", "neighbors", "neighbour", "neighbours"})
SIM_KEYWORDS = frozenset({"similar", "similarly"})

AGG_KEYWORDS = {
    "many": "count", "count": "count", "counts": "count", "number": "count",
    "average": "avg", "mean": "avg",
    "largest": "max", "biggest": "max", "longest": "max",
    "smallest": "min", "shortest": "min",
}

PREDICATE_CUES = {
    "cross": "intersects", "crosses": "intersects", "crossing": "intersects",
    "intersect": "intersects", "intersects": "intersects", "intersecting": "intersects",
    "touch": "intersects", "touches": "intersects", "touching": "intersects",
    "through": "intersects",
    "contain": "contains", "contains": "contains", "containing": "contains",
    "contained": "contains", "cover": "contains", "covers": "contains",
    "covering": "contains", "covered": "contains",
}

# Filler words the extractor skips without treating them as entities.
IGNORABLE = frozenset("""
located situated lying lie lies found moving moved move travel travels
traveled traveling trip trips ran run runs running observed recorded active
trajectory trajectories route routes movement pairs near closer reached
radius size value follow follows following
""".split())

DISTANCE_UNITS = {
    "m": 1.0, "meter": 1.0, "meters": 1.0, "metre": 1.0, "metres": 1.0,
    "km": 1000.0, "kilometer": 1000.0, "kilometers": 1000.0,
}

_UNITS = ["one", "two", "three", "four", "five", "six", "seven", "eight", "nine"]
_TEENS = ["ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen",
          "sixteen", "seventeen", "eighteen", "nineteen"]
_TENS = ["twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"]

_WORD_VALUES: dict[str, int] = {}
for _i, _w in enumerate(_UNITS, start=1):
    _WORD_VALUES[_w] = _i
for _i, _w in enumerate(_TEENS, start=10):
    _WORD_VALUES[_w] = _i
for _i, _w in enumerate(_TENS, start=2):
    _WORD_VALUES[_w] = _i * 10
_WORD_VALUES["hundred"] = 100

NUMBER_WORDS = frozenset(_WORD_VALUES)


def parse_number_words(tokens: list[str]) -> int | None:
    """Value of a run of number words ("fifty", "twenty five"); None if not one."""
    if not tokens or any(t not in _WORD_VALUES for t in tokens):
        return None
    if len(tokens) == 1:
        return _WORD_VALUES[tokens[0]]
    if len(tokens) == 2 and tokens[0] in _TENS and tokens[1] in _UNITS:
        return _WORD_VALUES[tokens[0]] + _WORD_VALUES[tokens[1]]
    if tokens == ["one", "hundred"]:
        return 100
    return None


def number_to_words(n: int) -> str:
    """English words for 1..100 (inverse of parse_number_words)."""
    if not 1 <= n <= 100:
        raise ValueError(f"number word rendering supports 1..100, got {n}")
    if n == 100:
        return "one hundred"
    if n < 10:
        return _UNITS[n - 1]
    if n < 20:
        return _TEENS[n - 10]
    tens, unit = divmod(n, 10)
    word = _TENS[tens - 2]
    return f"{word} {_UNITS[unit - 1]}" if unit else word


MS_PER_MINUTE = 60_000
MS_PER_HOUR = 3_600_000


def parse_time_token(token: str) -> int | None:
    """'6am', '12pm', '14:30' -> ms since midnight of the epoch day."""
    t = token.strip().lower()
    if t.endswith(("am", "pm")) and t[:-2].isdigit():
        hour = int(t[:-2])
        if not 1 <= hour <= 12:
            return None
        hour = hour % 12 + (12 if t.endswith("pm") else 0)
        return hour * MS_PER_HOUR
    if ":" in t:
        hh, _, mm = t.partition(":")
        if hh.isdigit() and mm.isdigit() and len(mm) == 2:
            hour, minute = int(hh), int(mm)
            if 0 <= hour <= 23 and 0 <= minute <= 59:
                return hour * MS_PER_HOUR + minute * MS_PER_MINUTE
    return None


def render_time(ms: int, ampm: bool) -> str:
    """Inverse of parse_time_token; ampm form requires a full hour."""
    hour, rem = divmod(ms, MS_PER_HOUR)
    minute = rem // MS_PER_MINUTE
    if ampm and minute == 0:
        suffix = "am" if hour < 12 else "pm"
        h12 = hour % 12 or 12
        return f"{h12}{suffix}"
    return f"{hour}:{minute:02d}"
