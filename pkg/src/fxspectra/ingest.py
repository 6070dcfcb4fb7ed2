"""Raw quote loading, calendar synchronization, and spike repair.

The raw input is a long-format CSV of daily quotes, one currency per row,
all priced in a single quote currency. The output is a rectangular
:class:`RatePanel`: one price row per currency on a shared, strictly
increasing trading calendar, with spike artifacts repaired in place and
logged.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    DuplicateQuote,
    EmptyIntersection,
    NonPositivePrice,
    ParseError,
    SeriesTooShort,
    SpikeCapExceeded,
)

RAW_HEADER = ("date", "currency", "price")


@dataclass(frozen=True)
class PreprocessConfig:
    spike_sigma: float = 5.0
    spike_fraction_cap: float = 0.005
    max_despike_passes: int = 3
    gap_policy: str = "carry_forward"  # or "intersect"
    min_series_length: int = 3

    def __post_init__(self):
        if self.spike_sigma < 1.0:
            raise ValueError("spike_sigma must be >= 1")
        if not 0.0 < self.spike_fraction_cap < 1.0:
            raise ValueError("spike_fraction_cap must be in (0, 1)")
        if self.max_despike_passes < 1:
            raise ValueError("max_despike_passes must be positive")
        if self.gap_policy not in ("carry_forward", "intersect"):
            raise ValueError(f"unknown gap_policy {self.gap_policy!r}")
        if self.min_series_length < 1:
            raise ValueError("min_series_length must be positive")


@dataclass(frozen=True)
class RawQuoteTable:
    """Long-format quotes: (date, currency, price-in-quote-currency)."""

    rows: tuple
    quote_currency: str

    def currencies(self) -> list[str]:
        """Distinct currency codes in first-appearance order."""
        seen: dict[str, None] = {}
        for _, code, _ in self.rows:
            seen.setdefault(code)
        return list(seen)


@dataclass(frozen=True)
class DespikeRecord:
    currency: str
    date: dt.date
    original: float
    replacement: float
    pass_number: int


@dataclass(frozen=True)
class RatePanel:
    """Rectangular daily price panel, all series in quote-currency units."""

    codes: list[str]
    quote_currency: str
    dates: list[dt.date]
    prices: np.ndarray  # shape (len(codes), len(dates)), strictly positive
    despike_log: list[DespikeRecord] = field(default_factory=list)

    def __post_init__(self):
        n, t = len(self.codes), len(self.dates)
        if self.prices.shape != (n, t):
            raise ValueError(f"prices shape {self.prices.shape} != ({n}, {t})")
        if len(set(self.codes)) != n:
            raise ValueError("duplicate currency codes")
        if self.quote_currency in self.codes:
            raise ValueError("quote currency listed against itself")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates not strictly increasing")
        if not np.all(self.prices > 0):
            raise ValueError("non-positive price in panel")

    @property
    def n_currencies(self) -> int:
        return len(self.codes)

    @property
    def n_dates(self) -> int:
        return len(self.dates)

    def universe(self) -> list[str]:
        """All base-able currencies: the listed codes plus the quote."""
        return [*self.codes, self.quote_currency]


def load_raw(path, quote_currency: str) -> RawQuoteTable:
    """Parse a `date,currency,price` CSV file."""
    with open(path, encoding="utf-8") as fh:
        return parse_raw_csv(fh.read(), quote_currency)


def parse_raw_csv(text: str, quote_currency: str) -> RawQuoteTable:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty file", line=1) from None
    if tuple(h.strip().lower() for h in header) != RAW_HEADER:
        raise ParseError(f"expected header {','.join(RAW_HEADER)}", line=1)

    rows = []
    seen: set[tuple[dt.date, str]] = set()
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", line=lineno)
        date_s, code, price_s = (f.strip() for f in row)
        try:
            date = dt.date.fromisoformat(date_s)
        except ValueError:
            raise ParseError(f"bad date {date_s!r}", line=lineno) from None
        if not code:
            raise ParseError("empty currency code", line=lineno)
        if code == quote_currency:
            raise ParseError(f"{code} quoted against itself", line=lineno)
        try:
            price = float(price_s)
        except ValueError:
            raise ParseError(f"bad price {price_s!r}", line=lineno) from None
        if not np.isfinite(price) or price <= 0.0:
            raise NonPositivePrice(f"line {lineno}: {code} {date} price {price_s}")
        if (date, code) in seen:
            raise DuplicateQuote(f"line {lineno}: duplicate quote for ({date}, {code})")
        seen.add((date, code))
        rows.append((date, code, price))
    return RawQuoteTable(rows=tuple(rows), quote_currency=quote_currency)


def synchronize(table: RawQuoteTable, cfg: PreprocessConfig) -> RatePanel:
    """Put every currency on one shared calendar with no missing cells.

    ``carry_forward``: the calendar is the union of quoted dates, missing
    cells take the last prior observation, and the panel starts at the
    latest first-quote date so no series needs backfilling.
    ``intersect``: the calendar is the intersection of quoted dates.
    """
    codes = table.currencies()
    by_code: dict[str, dict[dt.date, float]] = {c: {} for c in codes}
    for date, code, price in table.rows:
        by_code[code][date] = price

    for code in codes:
        if len(by_code[code]) < cfg.min_series_length:
            raise SeriesTooShort(code, len(by_code[code]), cfg.min_series_length)

    if cfg.gap_policy == "intersect":
        shared = set(by_code[codes[0]])
        for code in codes[1:]:
            shared &= set(by_code[code])
        if len(shared) < cfg.min_series_length:
            raise EmptyIntersection(
                f"{len(shared)} shared dates, need at least {cfg.min_series_length}"
            )
        dates = sorted(shared)
        prices = np.array([[by_code[c][d] for d in dates] for c in codes])
        return RatePanel(codes, table.quote_currency, dates, prices)

    start = max(min(quotes) for quotes in by_code.values())
    dates = sorted(d for quotes in by_code.values() for d in quotes if d >= start)
    dates = sorted(set(dates))
    prices = np.empty((len(codes), len(dates)))
    for i, code in enumerate(codes):
        quotes = by_code[code]
        last = quotes[max(d for d in quotes if d <= start)]
        for j, d in enumerate(dates):
            last = quotes.get(d, last)
            prices[i, j] = last
    return RatePanel(codes, table.quote_currency, dates, prices)


def despike(panel: RatePanel, cfg: PreprocessConfig) -> RatePanel:
    """Repair day-to-day jumps larger than ``spike_sigma`` standard deviations.

    Per currency and pass: compute log returns against the quote currency
    and their standard deviation; any |return| above the threshold marks the
    later price as a spike; spike prices are replaced by the geometric mean
    of the nearest non-spike neighbors (a lone neighbor is copied at the
    boundary). Passes repeat until clean or ``max_despike_passes``. The
    replaced-cell fraction may never exceed ``spike_fraction_cap``.
    """
    if panel.n_dates < 3:
        raise ValueError("despike needs at least 3 dates")
    prices = panel.prices.copy()
    log = list(panel.despike_log)
    n, t_p = prices.shape
    total = n * t_p

    for pass_number in range(1, cfg.max_despike_passes + 1):
        log_prices = np.log(prices)
        returns = np.diff(log_prices, axis=1)
        sigma = returns.std(axis=1, ddof=0)
        replaced_any = False
        for i in range(n):
            if sigma[i] == 0.0:
                continue
            hits = np.flatnonzero(np.abs(returns[i]) > cfg.spike_sigma * sigma[i]) + 1
            if hits.size == 0:
                continue
            replaced_any = True
            spiky = set(hits.tolist())
            good = [j for j in range(t_p) if j not in spiky]
            for j in sorted(spiky):
                left = max(g for g in good if g < j)  # index 0 is never a spike
                right = next((g for g in good if g > j), None)
                if right is None:
                    new_price = prices[i, left]
                else:
                    new_price = float(
                        np.exp(0.5 * (log_prices[i, left] + log_prices[i, right]))
                    )
                log.append(
                    DespikeRecord(
                        currency=panel.codes[i],
                        date=panel.dates[j],
                        original=float(prices[i, j]),
                        replacement=new_price,
                        pass_number=pass_number,
                    )
                )
                prices[i, j] = new_price
        fraction = len(log) / total
        if fraction > cfg.spike_fraction_cap:
            raise SpikeCapExceeded(fraction, cfg.spike_fraction_cap)
        if not replaced_any:
            break
    return replace(panel, prices=prices, despike_log=log)


def preprocess(table: RawQuoteTable, cfg: PreprocessConfig) -> RatePanel:
    """Full ingest path: synchronize the calendar, then repair spikes."""
    return despike(synchronize(table, cfg), cfg)


def subset_panel(panel: RatePanel, codes: list[str]) -> RatePanel:
    """Restrict a panel to the given currencies (panel order preserved)."""
    missing = [c for c in codes if c not in panel.codes]
    if missing:
        raise ValueError(f"codes not in panel: {missing}")
    keep = [c for c in panel.codes if c in set(codes)]
    idx = [panel.codes.index(c) for c in keep]
    return RatePanel(
        codes=keep,
        quote_currency=panel.quote_currency,
        dates=list(panel.dates),
        prices=panel.prices[idx],
        despike_log=[r for r in panel.despike_log if r.currency in set(keep)],
    )
