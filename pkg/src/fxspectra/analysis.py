"""Per-base sweeps: the maximal-eigenvalue ladder and per-base reports.

One pipeline pass per base currency: log returns -> normalization (dropping
zero-variance rows, e.g. hard pegs against that base) -> correlation matrix
-> eigendecomposition -> collectivity summary and noise-bound counts. The
ladder collects the largest eigenvalue of every base in the panel universe,
sorted descending; it ranks currencies by how much collective motion the
rest of the basket shows when priced in them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .corrmat import CorrelationMatrix, OffDiagHistogram, correlation_matrix, offdiag_histogram
from .errors import NoConvergence, SubsetTooSmall, UnknownBase
from .ingest import RatePanel, subset_panel
from .nullmodels import FICTITIOUS_CODE, NullSpec, fictitious_panel
from .rates import ReturnPanel, log_returns, normalize_with_exclusions
from .spectra import (
    EigenSpectrum,
    RmtBounds,
    collectivity_summary,
    eigendecompose,
    rmt_bounds,
)


@dataclass(frozen=True)
class LadderEntry:
    base: str
    lambda_max: float
    trace_fraction: float
    gap: float
    count_above_rmt: int
    m: int
    excluded: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class Ladder:
    entries: list[LadderEntry]  # sorted descending by lambda_max
    tau: int
    T: int
    includes_fictitious: bool
    omitted: list[tuple[str, str]] = field(default_factory=list)  # (base, reason)

    def bases(self) -> list[str]:
        return [e.base for e in self.entries]


@dataclass(frozen=True)
class PerBaseReport:
    correlation: CorrelationMatrix
    histogram: OffDiagHistogram
    spectrum: EigenSpectrum
    rmt: RmtBounds | None  # None for the degenerate 1x1 case
    excluded: list[str]


def base_pipeline(
    panel: RatePanel, base: str, tau: int = 1
) -> tuple[ReturnPanel, list[str], CorrelationMatrix, EigenSpectrum]:
    """Shared per-base pass up to the eigendecomposition."""
    rp, excluded = normalize_with_exclusions(log_returns(panel, base, tau))
    cm = correlation_matrix(rp)
    return rp, excluded, cm, eigendecompose(cm)


def _ladder_entry(panel: RatePanel, base: str, tau: int) -> LadderEntry | str:
    """One ladder rung, or a reason string when the base's panel collapses."""
    rp, excluded, cm, spectrum = base_pipeline(panel, base, tau)
    if spectrum.m < 2:
        return f"collapsed: {spectrum.m} usable rows after excluding {excluded}"
    summary = collectivity_summary(spectrum)
    bounds = rmt_bounds(spectrum, rp.T)
    return LadderEntry(
        base=base,
        lambda_max=summary.lambda_max,
        trace_fraction=summary.trace_fraction,
        gap=summary.gap,
        count_above_rmt=bounds.count_above,
        m=spectrum.m,
        excluded=excluded,
    )


def build_ladder(
    panel: RatePanel, tau: int = 1, include_fict: bool = False, seed: int = 0
) -> Ladder:
    """Ladder over every universe currency as base, optionally plus FIC.

    Real-base rungs come from the unmodified panel; the FIC rung comes from
    the noise-extended panel, so its matrix has one more row (reported via
    the entry's m). Bases whose panels collapse to fewer than 2 usable rows
    are omitted with a reason instead of failing the whole sweep.
    """
    if len(panel.universe()) < 3:
        raise ValueError("need a universe of at least 3 currencies")
    entries: list[LadderEntry] = []
    omitted: list[tuple[str, str]] = []
    for base in panel.universe():
        try:
            result = _ladder_entry(panel, base, tau)
        except NoConvergence as exc:
            raise NoConvergence(f"base {base}: {exc}") from exc
        if isinstance(result, str):
            omitted.append((base, result))
        else:
            entries.append(result)
    if include_fict:
        extended = fictitious_panel(
            panel, NullSpec(kind="fictitious", seed=seed, sigma_fict="match_median")
        )
        result = _ladder_entry(extended, FICTITIOUS_CODE, tau)
        if isinstance(result, str):
            omitted.append((FICTITIOUS_CODE, result))
        else:
            entries.append(result)
    entries.sort(key=lambda e: (-e.lambda_max, e.base))
    t_samples = (panel.n_dates - 1) // tau
    return Ladder(
        entries=entries,
        tau=tau,
        T=t_samples,
        includes_fictitious=include_fict,
        omitted=omitted,
    )


def per_base_report(
    panel: RatePanel, base: str, tau: int = 1, bins: int = 80
) -> PerBaseReport:
    """The four per-base artifacts from one shared pipeline pass."""
    if base not in panel.universe():
        raise UnknownBase(f"{base!r} not in panel universe")
    rp, excluded, cm, spectrum = base_pipeline(panel, base, tau)
    return PerBaseReport(
        correlation=cm,
        histogram=offdiag_histogram(cm, bins),
        spectrum=spectrum,
        rmt=rmt_bounds(spectrum, rp.T) if spectrum.m >= 2 else None,
        excluded=excluded,
    )


def sector_ladder(panel: RatePanel, subset: list[str], tau: int = 1) -> Ladder:
    """The full ladder restricted to a sub-basket of the listed currencies."""
    unknown = [c for c in subset if c not in panel.codes]
    if unknown:
        raise UnknownBase(f"sector codes not in panel: {unknown}")
    if len(subset) < 3:
        raise SubsetTooSmall(f"sector has {len(subset)} codes, need at least 3")
    return build_ladder(subset_panel(panel, subset), tau=tau, include_fict=False)


def scale_one_currency(panel: RatePanel, code: str, factor: float) -> RatePanel:
    """Rescale one currency's prices; ladder output is invariant to this."""
    if factor <= 0:
        raise ValueError("factor must be positive")
    i = panel.codes.index(code)
    prices = panel.prices.copy()
    prices[i] *= factor
    return RatePanel(
        codes=list(panel.codes),
        quote_currency=panel.quote_currency,
        dates=list(panel.dates),
        prices=prices,
        despike_log=list(panel.despike_log),
    )
