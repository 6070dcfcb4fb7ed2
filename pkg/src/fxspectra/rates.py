"""Log returns in any base currency, normalization, and no-arbitrage checks.

A :class:`~fxspectra.ingest.RatePanel` of n listed currencies plus its quote
currency spans an (n+1)-currency universe. For any base currency a in that
universe the cross rate of currency i is the price ratio, so its log return
decomposes as G_i - G_a where G is the return against the quote (and
identically zero for the quote itself). Two identities follow and hold here
by construction: the inverse rule (a's return in base i is the negation of
i's return in base a) and the triangle rule (returns around any 3-cycle of
bases sum to zero). Changing base is therefore a pure linear operation on
return rows, implemented by :func:`rebase`.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .errors import AlreadyNormalized, TauTooLarge, UnknownBase, ZeroVariance
from .ingest import RatePanel
from .rng import SplitMix64

SIGMA_MIN = 1e-12


@dataclass(frozen=True)
class ReturnPanel:
    """Log returns of every universe currency except the base, rows x time."""

    base: str
    codes: list[str]
    returns: np.ndarray  # shape (len(codes), T)
    tau: int = 1
    normalized: bool = False
    dates: list[dt.date] | None = None  # end date of each return interval

    def __post_init__(self):
        if self.returns.ndim != 2 or self.returns.shape[0] != len(self.codes):
            raise ValueError("returns shape does not match codes")
        if self.base in self.codes:
            raise ValueError("base listed among its own return rows")
        if len(set(self.codes)) != len(self.codes):
            raise ValueError("duplicate codes")
        if self.dates is not None and len(self.dates) != self.returns.shape[1]:
            raise ValueError("dates length does not match T")

    @property
    def m(self) -> int:
        return len(self.codes)

    @property
    def T(self) -> int:
        return self.returns.shape[1]


@dataclass(frozen=True)
class BaseChangeReport:
    max_inverse_residual: float
    max_triangle_residual: float
    worst_triple: tuple[str, str, str]
    sample_triples: int = 0


def _quote_based_log_returns(panel: RatePanel, tau: int) -> np.ndarray:
    """Per listed currency: non-overlapping lag-tau differences of log price."""
    if tau < 1:
        raise TauTooLarge("tau must be a positive integer")
    if tau >= panel.n_dates:
        raise TauTooLarge(f"tau={tau} but panel has only {panel.n_dates} dates")
    grid = np.arange(0, panel.n_dates, tau)
    log_prices = np.log(panel.prices[:, grid])
    return np.diff(log_prices, axis=1)


def _return_dates(panel: RatePanel, tau: int) -> list[dt.date]:
    grid = np.arange(0, panel.n_dates, tau)
    return [panel.dates[j] for j in grid[1:]]


def log_returns(panel: RatePanel, base: str, tau: int = 1) -> ReturnPanel:
    """Log returns of all other universe currencies expressed in ``base``."""
    quote_rows = _quote_based_log_returns(panel, tau)
    if base == panel.quote_currency:
        return ReturnPanel(
            base=base,
            codes=list(panel.codes),
            returns=quote_rows.copy(),
            tau=tau,
            dates=_return_dates(panel, tau),
        )
    if base not in panel.codes:
        raise UnknownBase(f"{base!r} not in panel universe")
    b = panel.codes.index(base)
    codes: list[str] = []
    rows: list[np.ndarray] = []
    for i, code in enumerate(panel.codes):
        if i == b:
            continue
        codes.append(code)
        rows.append(quote_rows[i] - quote_rows[b])
    codes.append(panel.quote_currency)
    rows.append(-quote_rows[b])
    return ReturnPanel(
        base=base,
        codes=codes,
        returns=np.array(rows),
        tau=tau,
        dates=_return_dates(panel, tau),
    )


def rebase(rp: ReturnPanel, new_base: str, original_base_code: str | None = None) -> ReturnPanel:
    """Re-express a raw return panel in ``new_base`` via the triangle rule.

    The new row set is the old one with ``new_base`` replaced, in place, by a
    row for the old base (whose returns are the negated ``new_base`` row).
    """
    if rp.normalized:
        raise AlreadyNormalized("rebasing normalized returns is meaningless")
    if new_base not in rp.codes:
        raise UnknownBase(f"{new_base!r} not among return rows")
    old_base = original_base_code if original_base_code is not None else rp.base
    k = rp.codes.index(new_base)
    pivot = rp.returns[k]
    codes = list(rp.codes)
    codes[k] = old_base
    returns = rp.returns - pivot
    returns[k] = -pivot
    return ReturnPanel(
        base=new_base,
        codes=codes,
        returns=returns,
        tau=rp.tau,
        dates=list(rp.dates) if rp.dates is not None else None,
    )


def normalize(rp: ReturnPanel) -> ReturnPanel:
    """Center and scale each row to zero mean, unit standard deviation (1/T).

    The second centering pass removes the floating-point residual of the
    first so the zero-mean invariant holds to ~1e-16 regardless of scale.
    """
    sigma = rp.returns.std(axis=1, ddof=0)
    for code, s in zip(rp.codes, sigma):
        if s <= SIGMA_MIN:
            raise ZeroVariance(code)
    centered = rp.returns - rp.returns.mean(axis=1, keepdims=True)
    centered -= centered.mean(axis=1, keepdims=True)
    scaled = centered / centered.std(axis=1, ddof=0, keepdims=True)
    return ReturnPanel(
        base=rp.base,
        codes=list(rp.codes),
        returns=scaled,
        tau=rp.tau,
        normalized=True,
        dates=list(rp.dates) if rp.dates is not None else None,
    )


def normalize_with_exclusions(rp: ReturnPanel) -> tuple[ReturnPanel, list[str]]:
    """Normalize, dropping zero-variance rows (hard pegs) instead of failing."""
    sigma = rp.returns.std(axis=1, ddof=0)
    keep = [i for i, s in enumerate(sigma) if s > SIGMA_MIN]
    excluded = [rp.codes[i] for i, s in enumerate(sigma) if s <= SIGMA_MIN]
    trimmed = ReturnPanel(
        base=rp.base,
        codes=[rp.codes[i] for i in keep],
        returns=rp.returns[keep],
        tau=rp.tau,
        dates=list(rp.dates) if rp.dates is not None else None,
    )
    return normalize(trimmed), excluded


def verify_constraints(
    panel: RatePanel,
    tau: int = 1,
    sample_triples: int = 1000,
    seed: int = 0,
    overrides: dict[tuple[str, str], np.ndarray] | None = None,
) -> BaseChangeReport:
    """Measure worst-case inverse and triangle residuals over sampled triples.

    On panel-derived rates both identities hold to rounding error; the check
    exists as a pipeline self-test and for externally supplied cross-rate
    return rows passed via ``overrides`` (keyed by (base, currency)).
    """
    universe = panel.universe()
    n = len(universe)
    if n < 3:
        raise ValueError("need at least 3 currencies to form a triangle")
    quote_rows = _quote_based_log_returns(panel, tau)
    lam = np.vstack([quote_rows, np.zeros(quote_rows.shape[1])])  # quote row last
    overrides = overrides or {}

    def row(a: int, i: int) -> np.ndarray:
        key = (universe[a], universe[i])
        if key in overrides:
            return overrides[key]
        return lam[i] - lam[a]

    total = n * (n - 1) * (n - 2)
    if sample_triples >= total:
        triples = [
            (a, i, b)
            for a in range(n)
            for i in range(n)
            for b in range(n)
            if a != i and i != b and b != a
        ]
    else:
        stream = SplitMix64(seed)
        triples = []
        while len(triples) < sample_triples:
            draw = stream.integers(3 * (sample_triples - len(triples)), n)
            for a, i, b in draw.reshape(-1, 3):
                if a != i and i != b and b != a:
                    triples.append((int(a), int(i), int(b)))
                    if len(triples) == sample_triples:
                        break

    max_inv = 0.0
    max_tri = 0.0
    worst = triples[0]
    for a, i, b in triples:
        inv = float(np.max(np.abs(row(a, i) + row(i, a))))
        tri = float(np.max(np.abs(row(a, i) + row(i, b) + row(b, a))))
        max_inv = max(max_inv, inv)
        if tri > max_tri:
            max_tri = tri
            worst = (a, i, b)
    return BaseChangeReport(
        max_inverse_residual=max_inv,
        max_triangle_residual=max_tri,
        worst_triple=(universe[worst[0]], universe[worst[1]], universe[worst[2]]),
        sample_triples=len(triples),
    )
