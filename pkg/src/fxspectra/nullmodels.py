"""Null hypotheses and synthetic worlds.

Three generators, all driven by the pinned SplitMix64 stream so identical
specs give bit-identical output:

* ``fictitious`` -- extend a real panel with one synthetic currency whose
  rate against the quote currency is pure noise, so it is disconnected from
  every real series while all real cross-rates stay untouched.
* ``random``     -- a panel of i.i.d. unit-variance returns, the all-noise
  reference whose correlation matrix obeys the Marchenko-Pastur law.
* ``one_factor`` -- n currencies sharing one common return factor with
  loading L, giving pairwise correlation L^2 by construction; the knob for
  dialing collectivity from none to total.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, replace

import numpy as np

from .ingest import RatePanel
from .rates import ReturnPanel
from .rng import SplitMix64

FICTITIOUS_CODE = "FIC"
KINDS = ("fictitious", "random", "one_factor")
SYNTHETIC_EPOCH = dt.date(2000, 1, 3)
RETURN_SCALE = 0.01  # daily-vol-like scale keeping synthetic price paths sane


@dataclass(frozen=True)
class NullSpec:
    kind: str
    seed: int
    sigma_fict: float | str = "match_median"
    factor_loading: float | None = None
    n: int | None = None
    m: int | None = None
    T: int | None = None
    distribution: str = "gaussian"  # or "uniform"; immaterial after normalization

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown null kind {self.kind!r}")
        if self.distribution not in ("gaussian", "uniform"):
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.kind == "fictitious":
            if self.sigma_fict != "match_median" and float(self.sigma_fict) < 0:
                raise ValueError("sigma_fict must be >= 0 or 'match_median'")
        if self.kind == "random":
            if not self.m or self.m < 1 or not self.T or self.T < 2:
                raise ValueError("random null needs m >= 1 and T >= 2")
        if self.kind == "one_factor":
            if self.factor_loading is None or not 0.0 <= self.factor_loading <= 1.0:
                raise ValueError("factor_loading must be in [0, 1]")
            if not self.n or self.n < 2 or not self.T or self.T < 2:
                raise ValueError("one_factor null needs n >= 2 and T >= 2")


def _draw(stream: SplitMix64, count: int, distribution: str) -> np.ndarray:
    if distribution == "uniform":
        return stream.uniform_symmetric(count)
    return stream.normals(count)


def _synthetic_dates(count: int) -> list[dt.date]:
    return [SYNTHETIC_EPOCH + dt.timedelta(days=k) for k in range(count)]


def fictitious_panel(panel: RatePanel, spec: NullSpec) -> RatePanel:
    """Append the noise currency FIC to a real panel.

    The quote/FIC log-return series is i.i.d. with standard deviation
    ``sigma_fict`` ("match_median" takes the median return sigma of the real
    rows); the price row is the integrated path's reciprocal, so every real
    currency's FIC cross-rate is its quote rate times the noise path.
    """
    if spec.kind != "fictitious":
        raise ValueError("spec.kind must be 'fictitious'")
    if FICTITIOUS_CODE in panel.codes:
        raise ValueError(f"panel already contains {FICTITIOUS_CODE}")
    if spec.sigma_fict == "match_median":
        returns = np.diff(np.log(panel.prices), axis=1)
        sigma = float(np.median(returns.std(axis=1, ddof=0)))
    else:
        sigma = float(spec.sigma_fict)
    stream = SplitMix64(spec.seed)
    noise = sigma * _draw(stream, panel.n_dates - 1, spec.distribution)
    quote_per_fic = np.exp(-np.concatenate(([0.0], np.cumsum(noise))))
    return replace(
        panel,
        codes=[*panel.codes, FICTITIOUS_CODE],
        prices=np.vstack([panel.prices, quote_per_fic]),
    )


def random_panel(spec: NullSpec) -> ReturnPanel:
    """m x T i.i.d. unit-variance return rows (the all-noise world)."""
    if spec.kind != "random":
        raise ValueError("spec.kind must be 'random'")
    stream = SplitMix64(spec.seed)
    rows = _draw(stream, spec.m * spec.T, spec.distribution).reshape(spec.m, spec.T)
    width = max(2, len(str(spec.m)))
    return ReturnPanel(
        base="RND",
        codes=[f"R{i + 1:0{width}d}" for i in range(spec.m)],
        returns=rows,
        tau=1,
        dates=_synthetic_dates(spec.T + 1)[1:],
    )


def one_factor_panel(spec: NullSpec) -> RatePanel:
    """n synthetic currencies with one shared return factor, quote 'SYN'.

    Row i's log return against the quote is L*f(t) + sqrt(1-L^2)*e_i(t)
    (times a fixed daily scale), drawn factor row first, then idiosyncratic
    rows in row-major order. T return periods integrate to T+1 prices
    starting at 1.
    """
    if spec.kind != "one_factor":
        raise ValueError("spec.kind must be 'one_factor'")
    n, t, loading = spec.n, spec.T, spec.factor_loading
    stream = SplitMix64(spec.seed)
    factor = _draw(stream, t, spec.distribution)
    idio = _draw(stream, n * t, spec.distribution).reshape(n, t)
    returns = RETURN_SCALE * (loading * factor + np.sqrt(1.0 - loading**2) * idio)
    log_prices = np.hstack([np.zeros((n, 1)), np.cumsum(returns, axis=1)])
    width = max(2, len(str(n)))
    return RatePanel(
        codes=[f"C{i + 1:0{width}d}" for i in range(n)],
        quote_currency="SYN",
        dates=_synthetic_dates(t + 1),
        prices=np.exp(log_prices),
    )
