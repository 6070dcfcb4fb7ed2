"""Shared synthetic-data builders for the test suite."""

from __future__ import annotations

import datetime as dt

import numpy as np
import pytest

from fxspectra.ingest import RatePanel
from fxspectra.rng import SplitMix64

EPOCH = dt.date(2001, 1, 1)


def make_dates(count: int, start: dt.date = EPOCH) -> list[dt.date]:
    return [start + dt.timedelta(days=k) for k in range(count)]


def panel_from_returns(rows: np.ndarray, codes: list[str], quote: str = "QUO") -> RatePanel:
    """Integrate per-currency log returns into a price panel starting at 1."""
    n, t = rows.shape
    log_prices = np.hstack([np.zeros((n, 1)), np.cumsum(rows, axis=1)])
    return RatePanel(
        codes=codes,
        quote_currency=quote,
        dates=make_dates(t + 1),
        prices=np.exp(log_prices),
    )


def random_walk_panel(seed: int, n: int = 5, T: int = 200, sigma: float = 0.01) -> RatePanel:
    """Independent geometric random walks, one per currency."""
    stream = SplitMix64(seed)
    rows = sigma * stream.normals(n * T).reshape(n, T)
    codes = [f"K{i + 1:02d}" for i in range(n)]
    return panel_from_returns(rows, codes)


def dominant_world(
    seed: int,
    n_sat: int = 8,
    n_vol: int = 3,
    T: int = 750,
    sigma_dom: float = 0.01,
    sigma_sat: float = 0.001,
    sigma_vol: float = 0.05,
) -> RatePanel:
    """A world with one anchor currency driving a bloc of pegged satellites.

    DOM's own moves propagate to every satellite rate (peg plus small slack),
    while the V currencies float with large independent volatility. Viewed
    from DOM everything is calm and diverse; viewed from anywhere else the
    basket moves together.
    """
    stream = SplitMix64(seed)
    r_dom = sigma_dom * stream.normals(T)
    sats = r_dom + sigma_sat * stream.normals(n_sat * T).reshape(n_sat, T)
    vols = sigma_vol * stream.normals(n_vol * T).reshape(n_vol, T)
    rows = np.vstack([r_dom, sats, vols])
    codes = (
        ["DOM"]
        + [f"S{i + 1:02d}" for i in range(n_sat)]
        + [f"V{i + 1:02d}" for i in range(n_vol)]
    )
    return panel_from_returns(rows, codes)


def raw_quote_csv(rows: list[tuple[str, str, str]]) -> str:
    return "date,currency,price\n" + "\n".join(",".join(r) for r in rows) + "\n"


@pytest.fixture
def small_panel() -> RatePanel:
    return random_walk_panel(seed=42, n=4, T=60)
