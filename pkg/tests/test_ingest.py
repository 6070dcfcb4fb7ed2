from __future__ import annotations

import datetime as dt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fxspectra.errors import (
    DuplicateQuote,
    EmptyIntersection,
    NonPositivePrice,
    ParseError,
    SeriesTooShort,
    SpikeCapExceeded,
)
from fxspectra.ingest import (
    PreprocessConfig,
    RatePanel,
    RawQuoteTable,
    despike,
    parse_raw_csv,
    subset_panel,
    synchronize,
)
from fxspectra.rng import SplitMix64

from conftest import make_dates, raw_quote_csv

CFG = PreprocessConfig()


# ------------------------------------------------------------ load_raw


def test_load_three_valid_rows():
    text = raw_quote_csv(
        [
            ("2001-03-05", "CHF", "0.59"),
            ("2001-03-05", "EUR", "0.93"),
            ("2001-03-06", "CHF", "0.60"),
        ]
    )
    table = parse_raw_csv(text, "USD")
    assert len(table.rows) == 3
    assert table.quote_currency == "USD"
    assert table.currencies() == ["CHF", "EUR"]


def test_zero_price_rejected():
    text = raw_quote_csv([("2001-03-05", "CHF", "0.0")])
    with pytest.raises(NonPositivePrice):
        parse_raw_csv(text, "USD")


def test_negative_price_rejected():
    text = raw_quote_csv([("2001-03-05", "CHF", "-3.0")])
    with pytest.raises(NonPositivePrice):
        parse_raw_csv(text, "USD")


def test_duplicate_date_currency_rejected():
    text = raw_quote_csv(
        [("2001-03-05", "CHF", "0.59"), ("2001-03-05", "CHF", "0.60")]
    )
    with pytest.raises(DuplicateQuote):
        parse_raw_csv(text, "USD")


def test_malformed_row_reports_line_number():
    text = "date,currency,price\n2001-03-05,CHF,0.59\nnot-a-date,EUR,1.0\n"
    with pytest.raises(ParseError) as err:
        parse_raw_csv(text, "USD")
    assert err.value.line == 3


def test_bad_header_rejected():
    with pytest.raises(ParseError):
        parse_raw_csv("day,code,px\n2001-03-05,CHF,0.59\n", "USD")


def test_self_quote_rejected():
    text = raw_quote_csv([("2001-03-05", "USD", "1.0")])
    with pytest.raises(ParseError):
        parse_raw_csv(text, "USD")


# --------------------------------------------------------- synchronize


def _table(rows: list[tuple[str, str, float]], quote: str = "USD") -> RawQuoteTable:
    return RawQuoteTable(
        rows=tuple((dt.date.fromisoformat(d), c, p) for d, c, p in rows),
        quote_currency=quote,
    )


MON, TUE, WED, THU = "2001-03-05", "2001-03-06", "2001-03-07", "2001-03-08"


def test_identical_calendars_pass_through():
    table = _table(
        [(MON, "A", 1.0), (TUE, "A", 1.1), (WED, "A", 1.2),
         (MON, "B", 2.0), (TUE, "B", 2.1), (WED, "B", 2.2)]
    )
    panel = synchronize(table, CFG)
    assert panel.codes == ["A", "B"]
    assert [d.isoformat() for d in panel.dates] == [MON, TUE, WED]
    assert np.array_equal(panel.prices, [[1.0, 1.1, 1.2], [2.0, 2.1, 2.2]])


def test_carry_forward_fills_gap_with_last_price():
    table = _table(
        [(MON, "A", 1.0), (TUE, "A", 1.1), (THU, "A", 1.3),
         (MON, "B", 2.0), (TUE, "B", 2.1), (WED, "B", 2.2), (THU, "B", 2.3)]
    )
    panel = synchronize(table, CFG)
    assert [d.isoformat() for d in panel.dates] == [MON, TUE, WED, THU]
    wed = panel.dates.index(dt.date.fromisoformat(WED))
    assert panel.prices[panel.codes.index("A"), wed] == 1.1


def test_intersect_keeps_shared_dates_only():
    table = _table(
        [(MON, "A", 1.0), (TUE, "A", 1.1), (THU, "A", 1.3),
         (MON, "B", 2.0), (TUE, "B", 2.1), (WED, "B", 2.2), (THU, "B", 2.3)]
    )
    panel = synchronize(table, PreprocessConfig(gap_policy="intersect"))
    assert [d.isoformat() for d in panel.dates] == [MON, TUE, THU]


def test_panel_starts_at_latest_first_quote():
    table = _table(
        [(MON, "A", 1.0), (TUE, "A", 1.1), (WED, "A", 1.2), (THU, "A", 1.3),
         (TUE, "B", 2.0), (WED, "B", 2.1), (THU, "B", 2.2)]
    )
    panel = synchronize(table, CFG)
    assert [d.isoformat() for d in panel.dates] == [TUE, WED, THU]


def test_series_too_short():
    table = _table([(MON, "A", 1.0), (TUE, "A", 1.1), (WED, "A", 1.2), (MON, "B", 2.0)])
    with pytest.raises(SeriesTooShort):
        synchronize(table, CFG)


def test_empty_intersection():
    table = _table(
        [(MON, "A", 1.0), (TUE, "A", 1.1), (WED, "A", 1.2),
         (THU, "B", 2.0), ("2001-03-09", "B", 2.1), ("2001-03-12", "B", 2.2)]
    )
    with pytest.raises(EmptyIntersection):
        synchronize(table, PreprocessConfig(gap_policy="intersect"))


def _panel_as_table(panel: RatePanel) -> RawQuoteTable:
    rows = tuple(
        (date, code, float(panel.prices[i, j]))
        for i, code in enumerate(panel.codes)
        for j, date in enumerate(panel.dates)
    )
    return RawQuoteTable(rows=rows, quote_currency=panel.quote_currency)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_synchronize_idempotent(seed):
    stream = SplitMix64(seed)
    n, t = 3, 12
    dates = make_dates(t)
    keep = stream.uniform(n * t).reshape(n, t) > 0.3
    keep[:, 0] = True  # every series starts quoted
    prices = 1.0 + stream.uniform(n * t).reshape(n, t)
    rows = tuple(
        (dates[j], f"C{i}", float(prices[i, j]))
        for i in range(n)
        for j in range(t)
        if keep[i, j]
    )
    table = RawQuoteTable(rows=rows, quote_currency="USD")
    once = synchronize(table, CFG)
    twice = synchronize(_panel_as_table(once), CFG)
    assert once.codes == twice.codes
    assert once.dates == twice.dates
    assert np.array_equal(once.prices, twice.prices)


# ------------------------------------------------------------- despike


def _panel_from_prices(prices: np.ndarray, codes: list[str]) -> RatePanel:
    return RatePanel(
        codes=codes,
        quote_currency="USD",
        dates=make_dates(prices.shape[1]),
        prices=prices,
    )


def scan_spikes(prices_row: np.ndarray, spike_sigma: float) -> list[int]:
    """Oracle: direct scan of |r|/sigma; returns spiked price indexes."""
    r = np.diff(np.log(prices_row))
    sigma = r.std(ddof=0)
    if sigma == 0:
        return []
    return (np.flatnonzero(np.abs(r) > spike_sigma * sigma) + 1).tolist()


def test_constant_series_untouched():
    panel = _panel_from_prices(np.full((2, 50), 3.25), ["A", "B"])
    out = despike(panel, CFG)
    assert np.array_equal(out.prices, panel.prices)
    assert out.despike_log == []


def test_single_boundary_spike_replaced_exactly():
    stream = SplitMix64(404)
    returns = 0.005 * stream.normals(199)
    prices = np.exp(np.concatenate(([0.0], np.cumsum(returns))))
    prices[-1] *= np.exp(0.05)  # one 10-sigma artifact at the boundary
    assert scan_spikes(prices, 5.0) == [199]  # oracle sees exactly one spike
    panel = _panel_from_prices(prices[None, :], ["A"])
    out = despike(panel, CFG)
    assert [(r.currency, panel.dates.index(r.date)) for r in out.despike_log] == [("A", 199)]
    assert out.prices[0, 199] == prices[198]  # boundary copies the lone neighbor
    assert np.array_equal(out.prices[0, :199], prices[:199])


def test_interior_spike_marks_both_jump_returns():
    stream = SplitMix64(405)
    returns = 0.005 * stream.normals(199)
    prices = np.exp(np.concatenate(([0.0], np.cumsum(returns))))
    prices[100] *= np.exp(0.05)  # corrupting one price makes two big returns
    assert scan_spikes(prices, 5.0) == [100, 101]
    panel = _panel_from_prices(prices[None, :], ["A"])
    out = despike(panel, CFG)
    first_pass = {panel.dates.index(r.date) for r in out.despike_log if r.pass_number == 1}
    assert first_pass == {100, 101}
    assert np.all(out.prices > 0)


def test_spike_cap_exceeded():
    stream = SplitMix64(406)
    n, t = 4, 200
    returns = 0.005 * stream.normals(n * (t - 1)).reshape(n, t - 1)
    prices = np.exp(np.hstack([np.zeros((n, 1)), np.cumsum(returns, axis=1)]))
    hit = stream.integers(n * t // 20, t - 1) + 1  # ~5% of cells
    for k, j in enumerate(hit):
        prices[k % n, j] *= np.exp(0.05)
    injected = sum(len(scan_spikes(prices[i], 5.0)) for i in range(n))
    assert injected / (n * t) > CFG.spike_fraction_cap  # oracle: count vs cap
    with pytest.raises(SpikeCapExceeded) as err:
        despike(_panel_from_prices(prices, [f"C{i}" for i in range(n)]), CFG)
    assert err.value.fraction > CFG.spike_fraction_cap


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_clean_panel_is_fixed_point(seed):
    stream = SplitMix64(seed)
    n, t = 3, 150
    returns = 0.004 * np.clip(stream.normals(n * (t - 1)).reshape(n, t - 1), -4.5, 4.5)
    prices = np.exp(np.hstack([np.zeros((n, 1)), np.cumsum(returns, axis=1)]))
    panel = _panel_from_prices(prices, [f"C{i}" for i in range(n)])
    clean = all(not scan_spikes(prices[i], 5.0) for i in range(n))
    out = despike(panel, CFG)
    if clean:
        assert np.array_equal(out.prices, panel.prices)
        assert out.despike_log == []
    assert len(out.despike_log) / (n * t) <= CFG.spike_fraction_cap
    assert np.all(out.prices > 0)


def test_row_permutation_equivariance():
    stream = SplitMix64(407)
    n, t = 4, 120
    returns = 0.005 * stream.normals(n * (t - 1)).reshape(n, t - 1)
    prices = np.exp(np.hstack([np.zeros((n, 1)), np.cumsum(returns, axis=1)]))
    prices[2, 60] *= np.exp(0.06)
    codes = ["A", "B", "C", "D"]
    out = despike(_panel_from_prices(prices, codes), CFG)
    perm = [2, 0, 3, 1]
    out_p = despike(
        _panel_from_prices(prices[perm], [codes[i] for i in perm]), CFG
    )
    assert out_p.codes == [codes[i] for i in perm]
    assert np.array_equal(out_p.prices, out.prices[perm])
    assert {(r.currency, r.date, r.original, r.replacement) for r in out.despike_log} == {
        (r.currency, r.date, r.original, r.replacement) for r in out_p.despike_log
    }


def test_despiking_flat_fill_never_flags():
    # LOCF-flat segments have zero returns, so they can never look like spikes
    table = _table(
        [(MON, "A", 1.0), (TUE, "A", 1.1), (THU, "A", 1.25),
         (MON, "B", 2.0), (TUE, "B", 2.1), (WED, "B", 2.2), (THU, "B", 2.3)]
    )
    panel = synchronize(table, CFG)
    out = despike(panel, CFG)
    assert out.despike_log == []


# -------------------------------------------------------------- panels


def test_panel_invariants_enforced():
    with pytest.raises(ValueError):
        RatePanel(["A"], "USD", make_dates(2), np.array([[1.0, -1.0]]))
    with pytest.raises(ValueError):
        RatePanel(["A", "A"], "USD", make_dates(2), np.ones((2, 2)))
    with pytest.raises(ValueError):
        RatePanel(["USD"], "USD", make_dates(2), np.ones((1, 2)))
    dates = [dt.date(2001, 1, 2), dt.date(2001, 1, 1)]
    with pytest.raises(ValueError):
        RatePanel(["A"], "USD", dates, np.ones((1, 2)))


def test_subset_panel(small_panel):
    sub = subset_panel(small_panel, ["K03", "K01"])
    assert sub.codes == ["K01", "K03"]  # panel order preserved
    i1, i3 = small_panel.codes.index("K01"), small_panel.codes.index("K03")
    assert np.array_equal(sub.prices, small_panel.prices[[i1, i3]])
    with pytest.raises(ValueError):
        subset_panel(small_panel, ["K01", "ZZZ"])
