"""HTTP service wrapping the normalize-and-verify pipeline.

Stateless: every request carries the full system document, every response is
a pure function of (document, options).  Parse and validation failures map
to 422 with a typed error body; domain failures inside the pipeline (a
non-commuting pair, say) come back inside the report with exit_code 1, so
batch clients can persist the report and exit accordingly.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__
from ..birkhoff import birkhoff_normalize
from ..errors import FocusFocusError, ParseError, ValidationError
from ..pipeline import PipelineConfig, run_pipeline
from ..systemio import bivariate_document, parse_system_document, series_document
from .models import (
    HealthResponse,
    NormalizeRequest,
    NormalizeResponse,
    PipelineRequest,
    ReportModel,
)

app = FastAPI(
    title="focusfocus",
    version=__version__,
    description="Birkhoff normal forms of commuting pairs at a focus-focus "
                "point, with exact residuals and numeric verification suites.",
)


@app.exception_handler(ParseError)
@app.exception_handler(ValidationError)
async def _input_error_handler(request, exc):
    return JSONResponse(status_code=422,
                        content={"type": type(exc).__name__, "message": str(exc)})


@app.exception_handler(FocusFocusError)
async def _domain_error_handler(request, exc):
    # Reached only from endpoints that do not fold domain errors into a
    # report (e.g. /normalize on a non-commuting pair).
    return JSONResponse(status_code=422,
                        content={"type": type(exc).__name__, "message": str(exc)})


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", name="focusfocus", version=__version__)


@app.post("/normalize", response_model=NormalizeResponse)
def normalize(request: NormalizeRequest) -> NormalizeResponse:
    """Formal stage only: exact normal form of the submitted pair."""
    spec = parse_system_document(request.system.model_dump(), request.order)
    result = birkhoff_normalize(spec)
    return NormalizeResponse(
        order=spec.order,
        normal_form={
            "leading_matrix": [[str(v) for v in row] for row in result.leading.rows()],
            "generator": series_document(result.generator),
            "g1": bivariate_document(result.g1),
            "g2": bivariate_document(result.g2),
            "g1_of_input": bivariate_document(result.normal_form_of_input(1)),
            "g2_of_input": bivariate_document(result.normal_form_of_input(2)),
        },
        ledger=[
            {
                "degree": e.degree,
                "remainder_terms": list(e.remainder_terms),
                "resonant_terms": list(e.resonant_terms),
                "generator_terms": e.generator_terms,
            }
            for e in result.ledger
        ],
    )


@app.post("/pipeline", response_model=ReportModel)
def pipeline(request: PipelineRequest) -> ReportModel:
    """Full batch run; the report carries per-criterion pass/fail and the
    exit code a batch client should use."""
    opts = request.options
    config = PipelineConfig(
        order=opts.order,
        verify_numeric=opts.verify_numeric,
        samples=opts.samples,
        radius=opts.radius,
        seed=opts.seed,
        nodes=opts.nodes,
        fd_step=opts.fd_step,
        tolerance=opts.tolerance,
    )
    report = run_pipeline(request.system.model_dump(), config)
    return ReportModel(**report)
