"""HTTP service tests: sessions, metered queries, refusals, journal replay."""

from __future__ import annotations

import concurrent.futures
import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from dpeda.core import ColumnSpec, Dataset, Schema
from dpeda.datagen import make_demo_dataset
from dpeda.service import create_app


@pytest.fixture()
def demo_datasets() -> dict[str, Dataset]:
    return {"cafe": make_demo_dataset()}


@pytest.fixture()
def client(demo_datasets) -> TestClient:
    return TestClient(create_app(demo_datasets, rng_seed=20240501))


def open_session(client: TestClient, budget: float = 1.0, **extra) -> str:
    payload = {"dataset_id": "cafe", "budget": budget, **extra}
    response = client.post("/sessions", json=payload)
    assert response.status_code == 201, response.text
    return response.json()["session_id"]


def query(client, session_id, function, columns, **extra):
    return client.post(
        f"/sessions/{session_id}/query",
        json={"function": function, "columns": columns, **extra},
    )


# ==== datasets ====


def test_list_datasets(client):
    body = client.get("/datasets").json()
    assert body == [{"id": "cafe", "num_numeric": 2, "num_categorical": 2}]


def test_schema_endpoint_mirrors_dataset_schema(client, demo_datasets):
    body = client.get("/datasets/cafe/schema").json()
    assert body == json.loads(demo_datasets["cafe"].schema.to_json())


def test_unknown_dataset_schema_404(client):
    response = client.get("/datasets/nope/schema")
    assert response.status_code == 404
    assert "error" in response.json()


# ==== sessions ====


def test_create_session_starts_unspent(client):
    response = client.post(
        "/sessions", json={"dataset_id": "cafe", "budget": 0.5, "eps_i_default": 0.02}
    )
    body = response.json()
    assert response.status_code == 201
    assert body["budget"] == 0.5
    assert body["spent"] == 0.0
    assert body["remaining"] == 0.5
    assert body["eps_i_default"] == 0.02
    assert body["session_id"].startswith("ses-")
    assert body["created_at"]


def test_session_get_roundtrip(client):
    sid = open_session(client)
    body = client.get(f"/sessions/{sid}").json()
    assert body["session_id"] == sid
    assert body["remaining"] == 1.0


def test_unknown_session_404(client):
    assert client.get("/sessions/ses-missing").status_code == 404
    assert query(client, "ses-missing", "MISS", ["total"]).status_code == 404


def test_unknown_source_dataset_404_before_any_state(client):
    response = client.post("/sessions", json={"dataset_id": "nope", "budget": 1.0})
    assert response.status_code == 404


def test_nonpositive_budget_rejected(client):
    for budget in (0.0, -1.0):
        response = client.post("/sessions", json={"dataset_id": "cafe", "budget": budget})
        assert response.status_code == 400
        assert "budget" in response.json()["error"]


def test_sessions_have_isolated_ledgers(client):
    a = open_session(client)
    b = open_session(client)
    assert query(client, a, "MISS", ["total"]).status_code == 200
    ledger_a = client.get(f"/sessions/{a}/ledger").json()
    ledger_b = client.get(f"/sessions/{b}/ledger").json()
    assert ledger_a["spent"] == pytest.approx(0.01)
    assert ledger_b["spent"] == 0.0
    assert len(ledger_b["charges"]) == 0


# ==== queries and metering ====


def test_dist_numeric_charges_five_eps_i(client):
    sid = open_session(client, eps_i_default=0.02)
    response = query(client, sid, "DIST", ["total"])
    body = response.json()
    assert response.status_code == 200
    assert body["epsilon_charged"] == pytest.approx(0.10)
    assert body["remaining"] == pytest.approx(0.90)
    assert set(body["result"]["values"]) == {"min", "max", "q1", "q2", "q3"}
    # total is clamped to [0, 50]; scale = width / eps_i
    assert body["result"]["noise_scale"] == pytest.approx(50.0 / 0.02)


def test_dist_categorical_single_charge(client):
    sid = open_session(client)
    body = query(client, sid, "DIST", ["drink"]).json()
    assert body["epsilon_charged"] == pytest.approx(0.01)
    assert body["result"]["kind"] == "categorical"
    assert body["result"]["categories"][-1] == "(missing)"
    assert len(body["result"]["counts"]) == len(body["result"]["categories"])


def test_per_query_eps_override(client):
    sid = open_session(client)
    body = query(client, sid, "MISS", ["total"], eps_i=0.05).json()
    assert body["epsilon_charged"] == pytest.approx(0.05)
    assert body["result"]["noise_scale"] == pytest.approx(1.0 / 0.05)


def test_eps_i_above_operator_cap_rejected(client):
    sid = open_session(client, budget=50.0)
    response = query(client, sid, "MISS", ["total"], eps_i=1.5)
    assert response.status_code == 400
    assert "maximum" in response.json()["error"]
    assert client.get(f"/sessions/{sid}/ledger").json()["spent"] == 0.0


def test_corr_charges_once_per_pair(client):
    sid = open_session(client)
    numeric = query(client, sid, "CORR", ["total", "wait_minutes"]).json()
    assert numeric["epsilon_charged"] == pytest.approx(0.01)
    assert numeric["result"]["method"] == "spearman"
    categorical = query(client, sid, "CORR", ["drink", "size"]).json()
    assert categorical["result"]["method"] == "cramers_v"
    assert 0.0 <= categorical["result"]["coefficient"] <= 1.0


def test_corr_mixed_kinds_rejected(client):
    sid = open_session(client)
    response = query(client, sid, "CORR", ["total", "drink"])
    assert response.status_code == 400


def test_outl_without_dist_409_names_prerequisite(client):
    sid = open_session(client)
    response = query(client, sid, "OUTL", ["total"])
    assert response.status_code == 409
    assert response.json()["prerequisite"] == "DIST/total"
    assert client.get(f"/sessions/{sid}/ledger").json()["spent"] == 0.0


def test_outl_after_dist_succeeds(client):
    sid = open_session(client)
    assert query(client, sid, "DIST", ["total"]).status_code == 200
    response = query(client, sid, "OUTL", ["total"])
    assert response.status_code == 200
    assert response.json()["epsilon_charged"] == pytest.approx(0.01)


def test_refusal_402_reports_remaining_and_leaves_state_unchanged(client):
    sid = open_session(client, budget=0.04)  # DIST numeric needs 0.05
    before = client.get(f"/sessions/{sid}/ledger").json()
    response = query(client, sid, "DIST", ["total"])
    assert response.status_code == 402
    body = response.json()
    assert set(body) == {"error", "remaining"}
    assert body["remaining"] == pytest.approx(0.04)
    after = client.get(f"/sessions/{sid}/ledger").json()
    assert after == before


def test_refused_group_is_all_or_nothing(client):
    # 0.03 budget admits three single charges but not the five-part DIST
    sid = open_session(client, budget=0.03)
    assert query(client, sid, "DIST", ["total"]).status_code == 402
    assert client.get(f"/sessions/{sid}/ledger").json()["charges"] == []
    for _ in range(3):
        assert query(client, sid, "MISS", ["total"]).status_code == 200
    assert query(client, sid, "MISS", ["total"]).status_code == 402


def test_ledger_lists_charges_in_order(client):
    sid = open_session(client)
    query(client, sid, "DIST", ["total"])
    query(client, sid, "MISS", ["total"])
    body = client.get(f"/sessions/{sid}/ledger").json()
    labels = [row["label"] for row in body["charges"]]
    assert labels == [
        "DIST/total/min",
        "DIST/total/max",
        "DIST/total/q1",
        "DIST/total/q2",
        "DIST/total/q3",
        "MISS/total",
    ]
    cumulative = [row["cumulative"] for row in body["charges"]]
    assert cumulative == sorted(cumulative)
    assert body["spent"] == pytest.approx(0.06)


def test_unknown_function_and_bad_arity_rejected(client):
    sid = open_session(client)
    assert query(client, sid, "RANK", ["total"]).status_code == 400
    assert query(client, sid, "MISS", ["total", "wait_minutes"]).status_code == 400
    assert query(client, sid, "MISS", ["drink"]).status_code == 400  # categorical
    assert query(client, sid, "DIST", ["ghost"]).status_code == 404


def test_responses_never_carry_true_values(client):
    sid = open_session(client)
    for function, columns in (
        ("DIST", ["total"]),
        ("DIST", ["drink"]),
        ("MISS", ["total"]),
        ("OUTL", ["total"]),
        ("CORR", ["total", "wait_minutes"]),
    ):
        payload = query(client, sid, function, columns).text
        assert "true" not in payload.lower()


def test_noise_is_fresh_across_sessions(client):
    a = open_session(client)
    b = open_session(client)
    va = query(client, a, "MISS", ["total"]).json()["result"]["count"]
    vb = query(client, b, "MISS", ["total"]).json()["result"]["count"]
    assert va != vb


# ==== synthesis ====


def test_synthesize_debits_once_and_queries_are_free(client):
    sid = open_session(client)
    response = client.post(
        f"/sessions/{sid}/synthesize", json={"epsilon": 0.06, "degree": 2}
    )
    assert response.status_code == 201
    body = response.json()
    assert body["dataset_id"].startswith("syn-")
    assert body["epsilon"] == pytest.approx(0.06)
    assert body["eps1"] == pytest.approx(0.03)
    assert body["eps2"] == pytest.approx(0.03)
    assert body["remaining"] == pytest.approx(0.94)

    ledger = client.get(f"/sessions/{sid}/ledger").json()
    assert [row["label"] for row in ledger["charges"]] == ["SYNTH"]

    synthetic_id = body["dataset_id"]
    free = query(client, sid, "DIST", ["total"], dataset_id=synthetic_id).json()
    assert free["epsilon_charged"] == 0.0
    assert free["remaining"] == pytest.approx(0.94)
    outl = query(client, sid, "OUTL", ["total"], dataset_id=synthetic_id)
    assert outl.status_code == 200  # no prerequisite on synthetic rows
    assert client.get(f"/sessions/{sid}/ledger").json()["spent"] == pytest.approx(0.06)


def test_synthesize_default_epsilon_matches_corr_share(client):
    # cafe has 2 numeric + 2 categorical: corr share = eps_i * (1 + 1)
    sid = open_session(client, eps_i_default=0.01)
    body = client.post(f"/sessions/{sid}/synthesize", json={}).json()
    assert body["epsilon"] == pytest.approx(0.02)


def test_synthesize_refused_when_budget_short(client):
    sid = open_session(client, budget=0.05)
    response = client.post(f"/sessions/{sid}/synthesize", json={"epsilon": 0.06})
    assert response.status_code == 402
    assert client.get(f"/sessions/{sid}/ledger").json()["spent"] == 0.0


def test_synthetic_dataset_is_private_to_its_session(client):
    a = open_session(client)
    b = open_session(client)
    synthetic_id = client.post(
        f"/sessions/{a}/synthesize", json={"epsilon": 0.06, "degree": 1}
    ).json()["dataset_id"]
    stolen = query(client, b, "MISS", ["total"], dataset_id=synthetic_id)
    assert stolen.status_code == 404


# ==== journal replay ====


def test_journal_replay_restores_budget_and_prerequisites(tmp_path, demo_datasets):
    journal = tmp_path / "journal.ndjson"
    first = TestClient(create_app(demo_datasets, journal_path=journal, rng_seed=1))
    sid = open_session(first, budget=0.5)
    assert query(first, sid, "DIST", ["total"]).status_code == 200
    assert query(first, sid, "MISS", ["total"]).status_code == 200
    before = first.get(f"/sessions/{sid}/ledger").json()

    second = TestClient(create_app(demo_datasets, journal_path=journal, rng_seed=2))
    after = second.get(f"/sessions/{sid}/ledger").json()
    assert after["spent"] == before["spent"]
    assert after["remaining"] == before["remaining"]
    assert [r["label"] for r in after["charges"]] == [
        r["label"] for r in before["charges"]
    ]
    # the journaled q1/q3 releases still satisfy the outlier prerequisite
    response = query(second, sid, "OUTL", ["total"])
    assert response.status_code == 200


def test_journal_replay_keeps_refusing_at_the_same_line(tmp_path, demo_datasets):
    journal = tmp_path / "journal.ndjson"
    first = TestClient(create_app(demo_datasets, journal_path=journal, rng_seed=1))
    sid = open_session(first, budget=0.06)
    assert query(first, sid, "DIST", ["total"]).status_code == 200
    assert query(first, sid, "MISS", ["total"]).status_code == 200
    assert query(first, sid, "MISS", ["wait_minutes"]).status_code == 402

    second = TestClient(create_app(demo_datasets, journal_path=journal, rng_seed=2))
    assert query(second, sid, "MISS", ["wait_minutes"]).status_code == 402
    assert second.get(f"/sessions/{sid}/ledger").json()["remaining"] == 0.0


def test_journal_survives_synthesis_charge_but_not_rows(tmp_path, demo_datasets):
    journal = tmp_path / "journal.ndjson"
    first = TestClient(create_app(demo_datasets, journal_path=journal, rng_seed=1))
    sid = open_session(first, budget=1.0)
    synthetic_id = first.post(
        f"/sessions/{sid}/synthesize", json={"epsilon": 0.06, "degree": 1}
    ).json()["dataset_id"]

    second = TestClient(create_app(demo_datasets, journal_path=journal, rng_seed=2))
    ledger = second.get(f"/sessions/{sid}/ledger").json()
    assert ledger["spent"] == pytest.approx(0.06)
    # synthetic rows are ephemeral; the charge survives, the dataset does not
    gone = query(second, sid, "MISS", ["total"], dataset_id=synthetic_id)
    assert gone.status_code == 404


# ==== concurrency ====


def test_concurrent_queries_keep_ledger_consistent(client):
    sid = open_session(client, budget=0.10)  # room for exactly 10 MISS charges

    def fire(_):
        return query(client, sid, "MISS", ["total"]).status_code

    with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
        codes = list(pool.map(fire, range(24)))

    assert codes.count(200) == 10
    assert codes.count(402) == 14
    ledger = client.get(f"/sessions/{sid}/ledger").json()
    assert len(ledger["charges"]) == 10
    assert ledger["spent"] == pytest.approx(0.10)
    assert ledger["remaining"] == 0.0


def test_constant_column_correlation_still_charges(client, demo_datasets):
    schema = Schema(
        (
            ColumnSpec("flat", "numeric", bounds=(0.0, 10.0)),
            ColumnSpec("row_id", "numeric", bounds=(0.0, 100.0)),
        )
    )
    rows = {"flat": [5.0] * 12, "row_id": [float(i) for i in range(12)]}
    ds = Dataset(schema, rows)
    app_client = TestClient(create_app({"flat": ds}, rng_seed=3))
    response = app_client.post("/sessions", json={"dataset_id": "flat", "budget": 1.0})
    sid = response.json()["session_id"]
    spearman = query(app_client, sid, "CORR", ["flat", "row_id"])
    # the noisy joint table smears a constant column's mass across bins, so
    # the released coefficient is defined; either way the charge stands
    assert spearman.status_code == 200
    body = spearman.json()["result"]
    if not body["undefined"]:
        assert -1.0 <= body["coefficient"] <= 1.0
    assert app_client.get(f"/sessions/{sid}/ledger").json()["spent"] == pytest.approx(0.01)
