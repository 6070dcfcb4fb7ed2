"""FastAPI application wrapping the analysis pipeline.

Stateless: every request carries its own panel (as CSV text) or generator
spec, and every response embeds the rendered output files. Domain errors
map onto HTTP statuses by category: input 400, data quality 409,
numerical failure 500, all with a uniform JSON envelope.
"""

from __future__ import annotations

import base64

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, analysis, corrmat, ingest, nullmodels, rates, serialize
from ..errors import FxSpectraError
from . import schemas

_STATUS = {"input": 400, "data": 409, "numeric": 500}


def _error_response(exc: FxSpectraError) -> JSONResponse:
    envelope = schemas.ErrorEnvelope(
        error=type(exc).__name__, category=exc.category, message=str(exc)
    )
    return JSONResponse(status_code=_STATUS[exc.category], content=envelope.model_dump())


def _panel_from_request(panel_csv: str, quote_currency: str | None) -> ingest.RatePanel:
    if not quote_currency:
        raise ValueError("quote_currency is required with panel_csv")
    return serialize.panel_from_csv(panel_csv, quote_currency)


def _null_spec(model: schemas.NullSpecModel) -> nullmodels.NullSpec:
    return nullmodels.NullSpec(
        kind=model.kind,
        seed=model.seed,
        sigma_fict=model.sigma_fict,
        factor_loading=model.factor_loading,
        n=model.n,
        m=model.m,
        T=model.T,
        distribution=model.distribution,
    )


def _analyze_input(req: schemas.AnalyzeRequest) -> tuple[rates.ReturnPanel, list[str]]:
    """Resolve the request to a normalized return panel plus exclusions."""
    if (req.panel_csv is None) == (req.null is None):
        raise ValueError("provide exactly one of panel_csv or null")
    if req.null is not None and req.null.kind == "random":
        rp = nullmodels.random_panel(_null_spec(req.null))
        return rates.normalize_with_exclusions(rp)
    if req.null is not None:
        spec = _null_spec(req.null)
        if req.null.kind == "one_factor":
            panel = nullmodels.one_factor_panel(spec)
        else:
            panel = nullmodels.fictitious_panel(
                _panel_from_request(req.panel_csv, req.quote_currency), spec
            )
    else:
        panel = _panel_from_request(req.panel_csv, req.quote_currency)
    base = req.base if req.base is not None else panel.quote_currency
    rp = rates.log_returns(panel, base, req.tau)
    return rates.normalize_with_exclusions(rp)


def _per_base_payload(
    cm: corrmat.CorrelationMatrix,
    report_bins: int,
    T: int,
    include_eigenvectors: bool,
) -> tuple[schemas.CorrelationModel, schemas.HistogramModel, schemas.SpectrumModel, schemas.RmtModel | None, dict[str, str]]:
    from ..spectra import eigendecompose, rmt_bounds

    hist = corrmat.offdiag_histogram(cm, report_bins)
    spectrum = eigendecompose(cm)
    bounds = rmt_bounds(spectrum, T) if spectrum.m >= 2 else None
    artifacts = {
        "correlation.csv": serialize.corr_to_csv(cm),
        "histogram.csv": serialize.histogram_to_csv(hist),
        "spectrum.csv": serialize.spectrum_to_csv(spectrum),
        "rmt.json": serialize.bounds_to_json(bounds) if bounds else "{}",
    }
    if include_eigenvectors:
        artifacts["eigenvectors.csv"] = serialize.eigenvectors_to_csv(spectrum, cm.codes)
    corr_model = schemas.CorrelationModel(
        base=cm.base,
        codes=list(cm.codes),
        values=cm.values.tolist(),
        T=cm.T,
        warnings=list(cm.warnings),
    )
    hist_model = schemas.HistogramModel(
        bin_edges=hist.bin_edges.tolist(),
        density=hist.density.tolist(),
        mean=hist.mean,
        mode_bin=hist.mode_bin,
        count=hist.count,
    )
    spec_model = schemas.SpectrumModel(
        eigenvalues=spectrum.eigenvalues.tolist(),
        ipr=spectrum.ipr.tolist(),
        trace_check=spectrum.trace_check,
        eigenvectors=spectrum.eigenvectors.tolist() if include_eigenvectors else None,
    )
    rmt_model = (
        schemas.RmtModel(
            q=bounds.q,
            lambda_minus=bounds.lambda_minus,
            lambda_plus=bounds.lambda_plus,
            count_above=bounds.count_above,
            count_below=bounds.count_below,
        )
        if bounds
        else None
    )
    return corr_model, hist_model, spec_model, rmt_model, artifacts


def create_app() -> FastAPI:
    app = FastAPI(title="fxspectra", version=__version__)

    @app.exception_handler(FxSpectraError)
    async def _domain_error(_: Request, exc: FxSpectraError) -> JSONResponse:
        return _error_response(exc)

    @app.exception_handler(ValueError)
    async def _value_error(_: Request, exc: ValueError) -> JSONResponse:
        envelope = schemas.ErrorEnvelope(
            error="ValueError", category="input", message=str(exc)
        )
        return JSONResponse(status_code=400, content=envelope.model_dump())

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/ingest", response_model=schemas.IngestResponse)
    def ingest_endpoint(req: schemas.IngestRequest) -> schemas.IngestResponse:
        cfg = ingest.PreprocessConfig(**req.options.model_dump())
        table = ingest.parse_raw_csv(req.csv_text, req.quote_currency)
        panel = ingest.preprocess(table, cfg)
        replaced = len(panel.despike_log)
        return schemas.IngestResponse(
            codes=list(panel.codes),
            quote_currency=panel.quote_currency,
            n_dates=panel.n_dates,
            first_date=panel.dates[0].isoformat(),
            last_date=panel.dates[-1].isoformat(),
            replaced_cells=replaced,
            replaced_fraction=replaced / (panel.n_currencies * panel.n_dates),
            artifacts={
                "panel.csv": serialize.panel_to_csv(panel),
                "despike_log.csv": serialize.despike_log_to_csv(panel.despike_log),
            },
        )

    @app.post("/analyze", response_model=schemas.AnalyzeResponse)
    def analyze_endpoint(req: schemas.AnalyzeRequest) -> schemas.AnalyzeResponse:
        rp, excluded = _analyze_input(req)
        cm = corrmat.correlation_matrix(rp)
        corr_model, hist_model, spec_model, rmt_model, artifacts = _per_base_payload(
            cm, req.bins, rp.T, req.include_eigenvectors
        )
        binary: dict[str, str] = {}
        if req.include_binary:
            binary["correlation.fxcm"] = base64.b64encode(
                serialize.corr_to_bytes(cm)
            ).decode("ascii")
        return schemas.AnalyzeResponse(
            base=rp.base,
            m=rp.m,
            T=rp.T,
            excluded=excluded,
            correlation=corr_model,
            histogram=hist_model,
            spectrum=spec_model,
            rmt=rmt_model,
            artifacts=artifacts,
            artifacts_binary=binary,
        )

    @app.post("/ladder", response_model=schemas.LadderResponse)
    def ladder_endpoint(req: schemas.LadderRequest) -> schemas.LadderResponse:
        panel = _panel_from_request(req.panel_csv, req.quote_currency)
        if req.sector is not None:
            ladder = analysis.sector_ladder(panel, req.sector, req.tau)
        else:
            ladder = analysis.build_ladder(
                panel, tau=req.tau, include_fict=req.include_fictitious, seed=req.seed
            )
        artifacts = {
            "ladder.csv": serialize.ladder_to_csv(ladder),
            "ladder.json": serialize.ladder_to_json(ladder),
        }
        if req.per_base:
            source = panel if req.sector is None else ingest.subset_panel(panel, req.sector)
            extended = None
            if req.include_fictitious:
                extended = nullmodels.fictitious_panel(
                    source, nullmodels.NullSpec(kind="fictitious", seed=req.seed)
                )
            for entry in ladder.entries:
                report_panel = extended if entry.base == nullmodels.FICTITIOUS_CODE else source
                rp, _, cm, _ = analysis.base_pipeline(report_panel, entry.base, req.tau)
                _, _, _, _, base_artifacts = _per_base_payload(cm, req.bins, rp.T, False)
                for name, text in base_artifacts.items():
                    artifacts[f"{entry.base}/{name}"] = text
        return schemas.LadderResponse(
            entries=[
                schemas.LadderEntryModel(
                    base=e.base,
                    lambda_max=e.lambda_max,
                    trace_fraction=e.trace_fraction,
                    gap=e.gap,
                    count_above_rmt=e.count_above_rmt,
                    m=e.m,
                    excluded=list(e.excluded),
                )
                for e in ladder.entries
            ],
            tau=ladder.tau,
            T=ladder.T,
            includes_fictitious=ladder.includes_fictitious,
            omitted=[{"base": b, "reason": r} for b, r in ladder.omitted],
            artifacts=artifacts,
        )

    @app.post("/null", response_model=schemas.NullResponse)
    def null_endpoint(req: schemas.NullRequest) -> schemas.NullResponse:
        spec = _null_spec(req.spec)
        if spec.kind == "random":
            rp = nullmodels.random_panel(spec)
            return schemas.NullResponse(
                kind=spec.kind,
                codes=list(rp.codes),
                quote_currency=None,
                T=rp.T,
                artifacts={"returns.csv": serialize.returns_to_csv(rp)},
            )
        if spec.kind == "one_factor":
            panel = nullmodels.one_factor_panel(spec)
        else:
            if req.panel_csv is None:
                raise ValueError("fictitious null needs panel_csv")
            panel = nullmodels.fictitious_panel(
                _panel_from_request(req.panel_csv, req.quote_currency), spec
            )
        return schemas.NullResponse(
            kind=spec.kind,
            codes=list(panel.codes),
            quote_currency=panel.quote_currency,
            T=panel.n_dates,
            artifacts={"panel.csv": serialize.panel_to_csv(panel)},
        )

    @app.post("/constraints", response_model=schemas.ConstraintsResponse)
    def constraints_endpoint(req: schemas.ConstraintsRequest) -> schemas.ConstraintsResponse:
        panel = _panel_from_request(req.panel_csv, req.quote_currency)
        report = rates.verify_constraints(
            panel, tau=req.tau, sample_triples=req.sample_triples, seed=req.seed
        )
        return schemas.ConstraintsResponse(
            max_inverse_residual=report.max_inverse_residual,
            max_triangle_residual=report.max_triangle_residual,
            worst_triple=list(report.worst_triple),
            sample_triples=report.sample_triples,
            artifacts={"constraints.json": serialize.report_to_json(report)},
        )

    return app


app = create_app()
