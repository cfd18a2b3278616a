"""The query service: sessions with private ledgers over operator-registered
datasets.

Status codes: 402 when a charge would overdraw the budget (body carries the
remaining balance), 409 when a query needs an earlier release (body names
it), 404 for unknown ids, 400 for domain errors. Every accepted charge is
journaled before the response leaves, so restarts replay to the same spent
budget. Synthetic datasets live only in memory; after a restart their
charges survive but the rows are gone.
"""

from __future__ import annotations

import datetime as dt
import json
from fractions import Fraction

import numpy as np
from fastapi import FastAPI
from fastapi.requests import Request
from fastapi.responses import JSONResponse

from dpeda.accountant import Ledger
from dpeda.core import CATEGORICAL, NUMERIC, Dataset
from dpeda.eda import (
    POST_PROCESS,
    PRODUCTION,
    ReleasePolicy,
    budget_closed_form,
    cramers_v_dp,
    dist_categorical,
    dist_label,
    dist_numeric,
    five_number_summary,
    missing_count,
    outlier_count,
    spearman_dp,
)
from dpeda.errors import (
    BudgetExhausted,
    DpError,
    MissingPrerequisite,
    NotFound,
    ParamError,
)
from dpeda.service.journal import Journal
from dpeda.service.models import (
    ChargeRow,
    CreateSessionRequest,
    DatasetInfo,
    LedgerResponse,
    QueryRequest,
    QueryResponse,
    SessionInfo,
    SynthesizeRequest,
    SynthesizeResponse,
)
from dpeda.service.store import DatasetRegistry, Session, SessionStore, fresh_id
from dpeda.synthesizer import synthesize

FUNCTIONS = ("DIST", "MISS", "OUTL", "CORR")

QUANTILE_PARTS = ("q1", "q3")


def _now() -> str:
    return dt.datetime.now(dt.timezone.utc).isoformat()


def _ledger_snapshot(ledger: Ledger) -> tuple[list[ChargeRow], float, float]:
    """Charge rows plus spent/remaining computed from one consistent copy."""
    charges = ledger.charges
    rows = []
    running = Fraction(0)
    for charge in charges:
        running += charge.eps_exact
        rows.append(
            ChargeRow(
                index=charge.index,
                label=charge.label,
                epsilon=charge.epsilon,
                cumulative=float(running),
                composition=charge.composition,
            )
        )
    spent = float(running)
    remaining = float(ledger.budget_exact - running)
    return rows, spent, remaining


def create_app(
    datasets: dict[str, Dataset],
    journal_path=None,
    max_eps_i: float = 1.0,
    rng_seed: int | None = None,
) -> FastAPI:
    """Build the service over operator-registered datasets.

    rng_seed exists for reproducible tests; it is an operator argument and is
    deliberately not reachable over HTTP. When journal_path names an existing
    journal the sessions in it are replayed before the app serves traffic.
    """
    registry = DatasetRegistry(datasets)
    store = SessionStore()
    journal = Journal(journal_path) if journal_path is not None else None
    seed_seq = np.random.SeedSequence(rng_seed)

    def spawn_rng() -> np.random.Generator:
        return np.random.default_rng(seed_seq.spawn(1)[0])

    if journal is not None:
        for record in journal.load():
            if record["type"] == "session":
                store.create(
                    dataset_id=record["dataset_id"],
                    budget=record["budget"],
                    eps_i_default=record["eps_i_default"],
                    created_at=record["created_at"],
                    rng=spawn_rng(),
                    session_id=record["session_id"],
                )
            elif record["type"] == "charge":
                session = store.get(record["session_id"])
                session.ledger.replay(
                    record["epsilon"], record["label"], record["composition"]
                )
                released = record.get("released")
                if released is not None:
                    _restore_quantile(session, record["label"], released)

    app = FastAPI(title="budget-metered private EDA", version="0.1.0")

    # ---- error mapping ----

    def body(status: int, payload: dict) -> JSONResponse:
        return JSONResponse(status_code=status, content=payload)

    @app.exception_handler(BudgetExhausted)
    async def on_exhausted(request: Request, exc: BudgetExhausted):
        return body(402, {"error": str(exc), "remaining": exc.remaining})

    @app.exception_handler(MissingPrerequisite)
    async def on_prerequisite(request: Request, exc: MissingPrerequisite):
        return body(409, {"error": str(exc), "prerequisite": exc.prerequisite})

    @app.exception_handler(NotFound)
    async def on_not_found(request: Request, exc: NotFound):
        return body(404, {"error": str(exc)})

    @app.exception_handler(DpError)
    async def on_domain_error(request: Request, exc: DpError):
        return body(400, {"error": str(exc)})

    # ---- datasets ----

    @app.get("/datasets")
    def list_datasets() -> list[DatasetInfo]:
        infos = []
        for dataset_id in registry.ids():
            schema = registry.get(dataset_id).schema
            infos.append(
                DatasetInfo(
                    id=dataset_id,
                    num_numeric=len(schema.numeric_names),
                    num_categorical=len(schema.categorical_names),
                )
            )
        return infos

    @app.get("/datasets/{dataset_id}/schema")
    def get_schema(dataset_id: str) -> dict:
        return json.loads(registry.get(dataset_id).schema.to_json())

    # ---- sessions ----

    def session_info(session: Session) -> SessionInfo:
        _, spent, remaining = _ledger_snapshot(session.ledger)
        return SessionInfo(
            session_id=session.id,
            dataset_id=session.dataset_id,
            budget=session.ledger.budget,
            spent=spent,
            remaining=remaining,
            eps_i_default=session.eps_i_default,
            created_at=session.created_at,
        )

    @app.post("/sessions", status_code=201)
    def create_session(request: CreateSessionRequest) -> SessionInfo:
        registry.get(request.dataset_id)  # 404 before any state change
        if not (request.eps_i_default > 0):
            raise ParamError(
                f"eps_i_default must be > 0, got {request.eps_i_default}"
            )
        session = store.create(
            dataset_id=request.dataset_id,
            budget=request.budget,
            eps_i_default=request.eps_i_default,
            created_at=_now(),
            rng=spawn_rng(),
        )
        if journal is not None:
            journal.append(
                {
                    "type": "session",
                    "session_id": session.id,
                    "dataset_id": session.dataset_id,
                    "budget": session.ledger.budget,
                    "eps_i_default": session.eps_i_default,
                    "created_at": session.created_at,
                }
            )
        return session_info(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> SessionInfo:
        return session_info(store.get(session_id))

    @app.get("/sessions/{session_id}/ledger")
    def get_ledger(session_id: str) -> LedgerResponse:
        session = store.get(session_id)
        rows, spent, remaining = _ledger_snapshot(session.ledger)
        return LedgerResponse(
            session_id=session.id,
            budget=session.ledger.budget,
            spent=spent,
            remaining=remaining,
            charges=rows,
        )

    # ---- queries ----

    @app.post("/sessions/{session_id}/query")
    def post_query(session_id: str, request: QueryRequest) -> QueryResponse:
        session = store.get(session_id)
        with session.lock:
            return _run_query(session, request)

    def _run_query(session: Session, request: QueryRequest) -> QueryResponse:
        if request.function not in FUNCTIONS:
            raise ParamError(
                f"unknown function {request.function!r}; expected one of {FUNCTIONS}"
            )
        eps_i = request.eps_i if request.eps_i is not None else session.eps_i_default
        if not (eps_i > 0):
            raise ParamError(f"eps_i must be > 0, got {eps_i}")
        if eps_i > max_eps_i:
            raise ParamError(
                f"eps_i {eps_i} exceeds the operator maximum {max_eps_i}"
            )
        if request.dataset_id is None:
            ds = registry.get(session.dataset_id)
            dataset_id = session.dataset_id
            policy = PRODUCTION
        else:
            if request.dataset_id not in session.synthetic:
                raise NotFound(
                    f"session owns no synthetic dataset {request.dataset_id!r}"
                )
            ds = session.synthetic[request.dataset_id]
            dataset_id = request.dataset_id
            policy = POST_PROCESS

        before = len(session.ledger.charges)
        result = _dispatch(session, ds, request.function, request.columns, eps_i, policy)
        new_charges = session.ledger.charges[before:]
        if journal is not None:
            for charge in new_charges:
                record = {
                    "type": "charge",
                    "session_id": session.id,
                    "label": charge.label,
                    "epsilon": charge.epsilon,
                    "composition": charge.composition,
                }
                released = _released_quantile(session, charge.label)
                if released is not None:
                    record["released"] = released
                journal.append(record)
        charged = float(sum(c.eps_exact for c in new_charges))
        _, _, remaining = _ledger_snapshot(session.ledger)
        return QueryResponse(
            function=request.function,
            columns=request.columns,
            dataset_id=dataset_id,
            epsilon_charged=charged,
            remaining=remaining,
            result=result,
        )

    def _dispatch(
        session: Session,
        ds: Dataset,
        function: str,
        columns: list[str],
        eps_i: float,
        policy: ReleasePolicy,
    ) -> dict:
        ledger = session.ledger if policy.charge else None
        rng = session.rng
        if function == "CORR":
            if len(columns) != 2:
                raise ParamError("CORR takes exactly two columns")
            kinds = {ds.schema.column(name).kind for name in columns}
            if kinds == {NUMERIC}:
                res = spearman_dp(ds, columns[0], columns[1], eps_i, ledger, rng, policy)
            elif kinds == {CATEGORICAL}:
                res = cramers_v_dp(ds, columns[0], columns[1], eps_i, ledger, rng, policy)
            else:
                raise ParamError("CORR needs two columns of the same kind")
            return {
                "method": res.method,
                "coefficient": res.coefficient,
                "undefined": res.undefined,
                "noise_scale": 1.0 / eps_i if policy.noise else 0.0,
            }
        if len(columns) != 1:
            raise ParamError(f"{function} takes exactly one column")
        column = columns[0]
        kind = ds.schema.column(column).kind
        if function == "DIST":
            if kind == NUMERIC:
                summary = dist_numeric(ds, column, eps_i, ledger, rng, policy)
                if policy.charge:
                    session.quantiles[column] = (summary.q1.value, summary.q3.value)
                return {
                    "kind": "numeric",
                    "values": {k: nv.value for k, nv in summary.parts().items()},
                    "noise_scale": summary.q2.params.scale if policy.noise else 0.0,
                }
            histogram = dist_categorical(ds, column, eps_i, ledger, rng, policy)
            return {
                "kind": "categorical",
                "categories": list(histogram.categories),
                "counts": [nv.value for nv in histogram.counts],
                "noise_scale": 1.0 / eps_i if policy.noise else 0.0,
            }
        if function == "MISS":
            nv = missing_count(ds, column, eps_i, ledger, rng, policy)
            return {"count": nv.value, "noise_scale": nv.params.scale if policy.noise else 0.0}
        # OUTL: cutoffs come from this session's paid-for quantile release,
        # or from the synthetic rows themselves (free post-processing)
        if policy.charge:
            if column not in session.quantiles:
                raise MissingPrerequisite(dist_label(column))
            q1, q3 = session.quantiles[column]
        else:
            summary = five_number_summary(ds.present_numeric(column))
            q1, q3 = summary["q1"], summary["q3"]
        nv = outlier_count(ds, column, eps_i, ledger, rng, q1=q1, q3=q3, policy=policy)
        return {"count": nv.value, "noise_scale": nv.params.scale if policy.noise else 0.0}

    def _released_quantile(session: Session, label: str) -> float | None:
        for part in QUANTILE_PARTS:
            suffix = f"/{part}"
            if label.startswith("DIST/") and label.endswith(suffix):
                column = label[len("DIST/"):-len(suffix)]
                cached = session.quantiles.get(column)
                if cached is not None:
                    return cached[0] if part == "q1" else cached[1]
        return None

    # ---- synthesis ----

    @app.post("/sessions/{session_id}/synthesize", status_code=201)
    def post_synthesize(session_id: str, request: SynthesizeRequest) -> SynthesizeResponse:
        session = store.get(session_id)
        with session.lock:
            source = registry.get(session.dataset_id)
            if request.epsilon is not None:
                epsilon = request.epsilon
            else:
                schema = source.schema
                epsilon = budget_closed_form(
                    len(schema.numeric_names),
                    len(schema.categorical_names),
                    session.eps_i_default,
                ).corr
            if not (epsilon > 0):
                raise ParamError(f"epsilon must be > 0, got {epsilon}")
            charge = session.ledger.charge(epsilon, "SYNTH")
            if journal is not None:
                journal.append(
                    {
                        "type": "charge",
                        "session_id": session.id,
                        "label": charge.label,
                        "epsilon": charge.epsilon,
                        "composition": charge.composition,
                    }
                )
            synthetic, record = synthesize(
                source, epsilon, request.degree, session.rng, bins=request.bins
            )
            dataset_id = fresh_id("syn")
            session.synthetic[dataset_id] = synthetic
            _, _, remaining = _ledger_snapshot(session.ledger)
            return SynthesizeResponse(
                dataset_id=dataset_id,
                epsilon=record.epsilon,
                eps1=record.eps1,
                eps2=record.eps2,
                degree=record.degree,
                remaining=remaining,
            )

    return app


def _restore_quantile(session: Session, label: str, released: float) -> None:
    """Rebuild the outlier-prerequisite cache from a replayed quantile charge."""
    for part in QUANTILE_PARTS:
        suffix = f"/{part}"
        if label.startswith("DIST/") and label.endswith(suffix):
            column = label[len("DIST/"):-len(suffix)]
            q1, q3 = session.quantiles.get(column, (0.0, 0.0))
            if part == "q1":
                session.quantiles[column] = (released, q3)
            else:
                session.quantiles[column] = (q1, released)
