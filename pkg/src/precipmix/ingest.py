"""Daily precipitation series: parsing, wet/dry spell extraction, Markov order test."""
import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ParseError, PreconditionError
from .special import chi2_sf

DRY, WET, MISSING = 0, 1, 2


@dataclass(frozen=True)
class IngestConfig:
    """Options for :func:`parse_csv`.

    missing_sentinel : value (e.g. -999) marking a missing day, besides empty fields.
    fill_gaps : insert explicit missing records for skipped calendar days.
    """

    missing_sentinel: float = None
    fill_gaps: bool = True


@dataclass
class DailySeries:
    dates: np.ndarray      # datetime64[D], consecutive days
    depth: np.ndarray      # mm, NaN where missing
    missing: np.ndarray    # bool

    def __post_init__(self):
        self.dates = np.asarray(self.dates, dtype="datetime64[D]")
        self.depth = np.asarray(self.depth, dtype=float)
        self.missing = np.asarray(self.missing, dtype=bool)
        if not (self.dates.shape == self.depth.shape == self.missing.shape):
            raise ValueError("dates, depth and missing must have equal length")
        if self.dates.size > 1 and np.any(np.diff(self.dates).astype(int) != 1):
            raise ValueError("dates must increase by exactly one day; represent gaps as missing records")
        present = ~self.missing
        if np.any(~np.isfinite(self.depth[present])) or np.any(self.depth[present] < 0):
            raise ValueError("present depths must be finite and nonnegative")
        self.depth = np.where(self.missing, np.nan, self.depth)

    def __len__(self):
        return self.depth.shape[0]

    @classmethod
    def from_depths(cls, depths, start="2000-01-01"):
        """Series from a depth sequence; ``None``/NaN entries are missing days."""
        vals = np.array([np.nan if v is None else v for v in depths], dtype=float)
        dates = np.datetime64(start, "D") + np.arange(vals.shape[0])
        return cls(dates, vals, np.isnan(vals))


def _is_header(fields):
    try:
        np.datetime64(fields[0].strip(), "D")
        return False
    except ValueError:
        return True


def parse_csv(source, config=None):
    """Read ``date,precip_mm`` rows into a :class:`DailySeries`.

    ``source`` is a path, a text/byte stream, or raw bytes. The header line is
    optional. Empty depth fields and the configured sentinel mark missing
    days. Dates must be ISO 8601 and strictly increasing; skipped days become
    missing records when ``config.fill_gaps`` is set.

    Raises
    ------
    ParseError
        Listing every malformed row with its line number.
    """
    config = config or IngestConfig()
    if isinstance(source, (bytes, bytearray)):
        text = bytes(source).decode("utf-8")
    elif isinstance(source, str):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw

    problems = []
    dates, depths = [], []
    for lineno, fields in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not fields or all(not f.strip() for f in fields):
            continue
        if lineno == 1 and _is_header(fields):
            continue
        if len(fields) < 2:
            fields = fields + [""]
        try:
            day = np.datetime64(fields[0].strip(), "D")
        except ValueError:
            problems.append((lineno, f"unparseable date {fields[0]!r}"))
            continue
        cell = fields[1].strip()
        if cell == "":
            value = math.nan
        else:
            try:
                value = float(cell)
            except ValueError:
                problems.append((lineno, f"unparseable depth {cell!r}"))
                continue
            if config.missing_sentinel is not None and value == config.missing_sentinel:
                value = math.nan
            elif not math.isfinite(value):
                problems.append((lineno, f"non-finite depth {cell!r}"))
                continue
            elif value < 0:
                problems.append((lineno, f"negative depth {value}"))
                continue
        if dates and day <= dates[-1][0]:
            problems.append((lineno, f"date {day} does not increase (previous {dates[-1][0]})"))
            continue
        if dates and not config.fill_gaps and (day - dates[-1][0]).astype(int) != 1:
            problems.append((lineno, f"gap before {day} and gap filling disabled"))
            continue
        dates.append((day, lineno))
        depths.append(value)
    if problems:
        raise ParseError(problems)
    if not dates:
        return DailySeries(np.empty(0, "datetime64[D]"), np.empty(0), np.empty(0, bool))

    day0 = dates[0][0]
    offsets = np.array([(d - day0).astype(int) for d, _ in dates])
    n = int(offsets[-1]) + 1
    depth = np.full(n, np.nan)
    depth[offsets] = depths
    return DailySeries(day0 + np.arange(n), depth, np.isnan(depth))


def day_states(series: DailySeries, wet_threshold=0.0):
    """0 dry, 1 wet (depth > threshold), 2 missing."""
    with np.errstate(invalid="ignore"):
        wet = series.depth > wet_threshold
    states = np.where(wet, WET, DRY).astype(np.int8)
    states[series.missing] = MISSING
    return states


@dataclass
class SpellSample:
    wet_durations: np.ndarray
    dry_durations: np.ndarray
    wet_totals: np.ndarray
    wet_day_depths: np.ndarray
    discarded_spells: int = 0
    discarded_days: int = 0
    missing_days: int = 0
    series_length: int = 0
    wet_threshold: float = 0.0
    extra: dict = field(default_factory=dict)

    def summary(self):
        return {
            "series_length": self.series_length,
            "wet_threshold": self.wet_threshold,
            "wet_spells": int(self.wet_durations.size),
            "dry_spells": int(self.dry_durations.size),
            "wet_days_total": int(self.wet_day_depths.size),
            "discarded_spells": int(self.discarded_spells),
            "discarded_days": int(self.discarded_days),
            "missing_days": int(self.missing_days),
        }

    def to_dict(self):
        out = self.summary()
        out.update({
            "wet_durations": self.wet_durations.tolist(),
            "dry_durations": self.dry_durations.tolist(),
            "wet_totals": self.wet_totals.tolist(),
            "wet_day_depths": self.wet_day_depths.tolist(),
        })
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def extract_spells(series: DailySeries, wet_threshold=0.0) -> SpellSample:
    """Split a series into maximal wet and dry runs.

    Runs touching the series boundary or a missing day are discarded, since
    their true length is unknown; they are counted in ``discarded_spells``.
    ``wet_day_depths`` keeps the depth of every wet day, kept run or not.
    """
    if wet_threshold < 0:
        raise ValueError("wet_threshold must be nonnegative")
    states = day_states(series, wet_threshold)
    n = states.shape[0]
    starts, lengths, values = kernels.run_lengths(states)
    m = starts.shape[0]
    if m:
        prev_ok = np.zeros(m, dtype=bool)
        next_ok = np.zeros(m, dtype=bool)
        prev_ok[1:] = values[:-1] != MISSING
        next_ok[:-1] = values[1:] != MISSING
    else:
        prev_ok = next_ok = np.zeros(0, dtype=bool)
    spell = values != MISSING
    kept = spell & prev_ok & next_ok
    wet_kept = kept & (values == WET)
    dry_kept = kept & (values == DRY)

    depth0 = np.where(states == WET, series.depth, 0.0)
    # per-run sums; differences of a running cumsum would cancel small spells
    totals = np.add.reduceat(depth0, starts) if m else np.empty(0)
    discarded = spell & ~kept
    return SpellSample(
        wet_durations=lengths[wet_kept].astype(np.int64),
        dry_durations=lengths[dry_kept].astype(np.int64),
        wet_totals=totals[wet_kept],
        wet_day_depths=series.depth[states == WET],
        discarded_spells=int(discarded.sum()),
        discarded_days=int(lengths[discarded].sum()),
        missing_days=int(np.sum(states == MISSING)),
        series_length=int(n),
        wet_threshold=float(wet_threshold),
    )


@dataclass
class MarkovTestReport:
    """Likelihood-ratio tests of order m against order m + 1."""

    n_days: int
    wet_threshold: float
    rows: list

    def to_dict(self):
        return {"n_days": self.n_days, "wet_threshold": self.wet_threshold, "tests": self.rows}


def _g_statistic(counts, m):
    """G^2 for order m vs m + 1 from counts of length-(m+2) patterns."""
    # counts indexed by (context of m+1 bits, next bit)
    n_ctx = counts.reshape(1 << (m + 1), 2)
    big = n_ctx.sum(axis=1, keepdims=True)
    # the order-m context drops the oldest bit
    small_tab = n_ctx.reshape(2, 1 << m, 2).sum(axis=0)
    small_tot = small_tab.sum(axis=1, keepdims=True)
    small = np.tile(small_tab, (2, 1))
    small_n = np.tile(small_tot, (2, 1))
    with np.errstate(divide="ignore", invalid="ignore"):
        term = n_ctx * (np.log(n_ctx) - np.log(big) - np.log(small) + np.log(small_n))
    return float(2.0 * np.nansum(np.where(n_ctx > 0, term, 0.0)))


def markov_order_test(series: DailySeries, wet_threshold=0.0, max_order=3):
    """Test Markov order m against m + 1 for m = 0 .. max_order - 1.

    The wet/dry indicator sequence is split at missing days; each test uses
    the transitions with m + 1 valid predecessors inside a segment, and both
    nested models are fitted to exactly those transitions. The statistic is
    asymptotically chi-square with 2^m degrees of freedom.
    """
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    states = day_states(series, wet_threshold)
    present = int(np.sum(states != MISSING))
    if present < 100:
        raise PreconditionError(f"Markov order test needs >= 100 non-missing days, got {present}")
    symbols = np.where(states == MISSING, -1, states).astype(np.int8)
    rows = []
    for m in range(max_order):
        counts = kernels.window_counts(symbols, m + 2)
        n_trans = int(counts.sum())
        if n_trans == 0:
            rows.append({"order": m, "alternative": m + 1, "statistic": None, "df": 1 << m,
                         "p_value": None, "transitions": 0})
            continue
        stat = max(0.0, _g_statistic(counts, m))
        df = 1 << m
        rows.append({"order": m, "alternative": m + 1, "statistic": stat, "df": df,
                     "p_value": chi2_sf(stat, df), "transitions": n_trans})
    return MarkovTestReport(present, float(wet_threshold), rows)
