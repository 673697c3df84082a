"""Request and response schemas for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field


class TermModel(BaseModel):
    """One monomial: exponent 4-tuple plus exact rational coefficient
    ("p/q", or a ["p/q", "r/s"] real/imaginary pair)."""

    exponents: list[int] = Field(min_length=4, max_length=4)
    coeff: Union[str, list[str]]


class SystemDocument(BaseModel):
    """A pair of series and the requested truncation order.

    With variables="real" the exponents are powers of x1^i xi1^j x2^k xi2^l;
    with variables="complex" they are powers of z1^a1 z2^a2 zbar1^b1 zbar2^b2.
    """

    variables: Literal["real", "complex"] = "real"
    f1: list[TermModel]
    f2: list[TermModel]
    order: int = Field(ge=2)


class PipelineOptions(BaseModel):
    """Run settings; defaults match the CLI."""

    order: Optional[int] = Field(default=None, ge=2)
    verify_numeric: bool = False
    samples: int = Field(default=50, ge=1)
    radius: float = Field(default=1.0, gt=0)
    seed: int = 0
    nodes: int = Field(default=64, ge=8)
    fd_step: float = Field(default=1e-4, gt=0)
    tolerance: float = Field(default=1e-5, gt=0)


class PipelineRequest(BaseModel):
    system: SystemDocument
    options: PipelineOptions = PipelineOptions()


class NormalizeRequest(BaseModel):
    system: SystemDocument
    order: Optional[int] = Field(default=None, ge=2)


class CriterionModel(BaseModel):
    name: str
    passed: bool
    detail: str


class StageModel(BaseModel):
    name: str
    status: str
    model_config = {"extra": "allow"}


class ReportModel(BaseModel):
    """Full pipeline report; see docs/report-schema.json for the layout of
    the nested payloads."""

    tool: dict
    config: dict
    input: dict
    stages: list[StageModel]
    criteria: list[CriterionModel]
    normal_form: Optional[dict] = None
    verification: Optional[dict] = None
    status: Literal["pass", "fail"]
    exit_code: int


class NormalFormModel(BaseModel):
    leading_matrix: list[list[str]]
    generator: dict
    g1: dict
    g2: dict
    g1_of_input: dict
    g2_of_input: dict


class NormalizeResponse(BaseModel):
    order: int
    normal_form: NormalFormModel
    ledger: list[dict]


class ErrorModel(BaseModel):
    type: str
    message: str


class HealthResponse(BaseModel):
    status: str
    name: str
    version: str
