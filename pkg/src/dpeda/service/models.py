"""Request and response bodies for the HTTP API.

Validation here is structural only; domain rules (budget positivity, column
kinds, epsilon caps) live in the core package and surface as {error, ...}
bodies with the status codes the API contract names.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class CreateSessionRequest(BaseModel):
    dataset_id: str
    budget: float
    eps_i_default: float = 0.01


class SessionInfo(BaseModel):
    session_id: str
    dataset_id: str
    budget: float
    spent: float
    remaining: float
    eps_i_default: float
    created_at: str


class QueryRequest(BaseModel):
    function: str = Field(description="DIST, MISS, OUTL, or CORR")
    columns: list[str] = Field(min_length=1, max_length=2)
    eps_i: float | None = None
    dataset_id: str | None = Field(
        default=None,
        description="a synthetic dataset owned by this session; default source",
    )


class QueryResponse(BaseModel):
    function: str
    columns: list[str]
    dataset_id: str
    epsilon_charged: float
    remaining: float
    result: dict


class ChargeRow(BaseModel):
    index: int
    label: str
    epsilon: float
    cumulative: float
    composition: str


class LedgerResponse(BaseModel):
    session_id: str
    budget: float
    spent: float
    remaining: float
    charges: list[ChargeRow]


class SynthesizeRequest(BaseModel):
    epsilon: float | None = None   # default: the CORR closed-form budget
    degree: int = 4
    bins: int = 20


class SynthesizeResponse(BaseModel):
    dataset_id: str
    epsilon: float
    eps1: float
    eps2: float
    degree: int
    remaining: float


class DatasetInfo(BaseModel):
    id: str
    num_numeric: int
    num_categorical: int
