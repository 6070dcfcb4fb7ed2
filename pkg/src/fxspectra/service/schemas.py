"""Request and response models for the HTTP service.

Responses carry both structured results and an ``artifacts`` map of
relative path -> rendered file text (``artifacts_binary`` holds base64 for
the one binary format), so any client can materialize byte-identical output
files without redoing any formatting.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class PreprocessOptions(BaseModel):
    spike_sigma: float = 5.0
    spike_fraction_cap: float = Field(default=0.005, gt=0.0, lt=1.0)
    max_despike_passes: int = Field(default=3, ge=1)
    gap_policy: Literal["carry_forward", "intersect"] = "carry_forward"
    min_series_length: int = Field(default=3, ge=1)


class NullSpecModel(BaseModel):
    kind: Literal["fictitious", "random", "one_factor"]
    seed: int = 0
    sigma_fict: float | Literal["match_median"] = "match_median"
    factor_loading: float | None = Field(default=None, ge=0.0, le=1.0)
    n: int | None = None
    m: int | None = None
    T: int | None = None
    distribution: Literal["gaussian", "uniform"] = "gaussian"


class IngestRequest(BaseModel):
    csv_text: str
    quote_currency: str
    options: PreprocessOptions = PreprocessOptions()


class IngestResponse(BaseModel):
    codes: list[str]
    quote_currency: str
    n_dates: int
    first_date: str
    last_date: str
    replaced_cells: int
    replaced_fraction: float
    artifacts: dict[str, str]


class AnalyzeRequest(BaseModel):
    panel_csv: str | None = None
    quote_currency: str | None = None
    null: NullSpecModel | None = None
    base: str | None = None
    tau: int = Field(default=1, ge=1)
    bins: int = Field(default=80, ge=10)
    include_eigenvectors: bool = False
    include_binary: bool = False


class CorrelationModel(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    base: str
    codes: list[str]
    values: list[list[float]]
    T: int
    warnings: list[str]


class HistogramModel(BaseModel):
    bin_edges: list[float]
    density: list[float]
    mean: float
    mode_bin: float
    count: int


class SpectrumModel(BaseModel):
    eigenvalues: list[float]
    ipr: list[float]
    trace_check: float
    eigenvectors: list[list[float]] | None = None


class RmtModel(BaseModel):
    q: float
    lambda_minus: float
    lambda_plus: float
    count_above: int
    count_below: int


class AnalyzeResponse(BaseModel):
    base: str
    m: int
    T: int
    excluded: list[str]
    correlation: CorrelationModel
    histogram: HistogramModel
    spectrum: SpectrumModel
    rmt: RmtModel | None
    artifacts: dict[str, str]
    artifacts_binary: dict[str, str] = {}


class LadderRequest(BaseModel):
    panel_csv: str
    quote_currency: str
    tau: int = Field(default=1, ge=1)
    include_fictitious: bool = False
    seed: int = 0
    sector: list[str] | None = None
    per_base: bool = False
    bins: int = Field(default=80, ge=10)


class LadderEntryModel(BaseModel):
    base: str
    lambda_max: float
    trace_fraction: float
    gap: float
    count_above_rmt: int
    m: int
    excluded: list[str]


class LadderResponse(BaseModel):
    entries: list[LadderEntryModel]
    tau: int
    T: int
    includes_fictitious: bool
    omitted: list[dict[str, str]]
    artifacts: dict[str, str]


class NullRequest(BaseModel):
    spec: NullSpecModel
    panel_csv: str | None = None  # fictitious extends a real panel
    quote_currency: str | None = None


class NullResponse(BaseModel):
    kind: str
    codes: list[str]
    quote_currency: str | None
    T: int
    artifacts: dict[str, str]


class ConstraintsRequest(BaseModel):
    panel_csv: str
    quote_currency: str
    tau: int = Field(default=1, ge=1)
    sample_triples: int = Field(default=1000, ge=1)
    seed: int = 0


class ConstraintsResponse(BaseModel):
    max_inverse_residual: float
    max_triangle_residual: float
    worst_triple: list[str]
    sample_triples: int
    artifacts: dict[str, str]


class ErrorEnvelope(BaseModel):
    error: str
    category: Literal["input", "data", "numeric"]
    message: str
