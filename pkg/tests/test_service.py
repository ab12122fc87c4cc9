import json
from fractions import Fraction as F

import pytest
from fastapi.testclient import TestClient

from rentdiv.service import FileSessionStore, InMemorySessionStore, create_app


@pytest.fixture
def client():
    return TestClient(create_app())


def e1_doc():
    return {
        "agents": [
            {"id": "1", "values": {"a": "100", "b": "60"}, "budget": "0", "rho": "0"},
            {"id": "2", "values": {"a": "80", "b": "70"}, "budget": "0", "rho": "0"},
        ],
        "rooms": ["a", "b"],
        "total_rent": "100",
        "rho_menu": ["0"],
        "rho_bar": "0",
    }


def e2_doc():
    doc = e1_doc()
    doc["agents"][0]["budget"] = "60"
    doc["agents"][0]["rho"] = "1"
    doc["rho_menu"] = ["0", "1"]
    doc["rho_bar"] = "1"
    return doc


class TestSolveEndpoint:
    def test_solve_e2_with_trace(self, client):
        resp = client.post("/v1/solve", json={"economy": e2_doc(), "trace": True})
        assert resp.status_code == 200
        body = resp.json()
        assert body["allocation"]["rents"] == {"a": "190/3", "b": "110/3"}
        assert body["objective_value"] == "100/3"
        assert body["certificate"]["ok"] is True
        assert body["certificate"]["kind"] == "maxmin-utility"
        assert len(body["trace"]["iterations"]) == 2
        assert body["utilities"] == {"1": "100/3", "2": "100/3"}

    def test_solve_objective_variant(self, client):
        resp = client.post("/v1/solve", json={"economy": e1_doc(), "objective": "maxmin-rent"})
        assert resp.status_code == 200
        assert resp.json()["allocation"]["rents"] == {"a": "55", "b": "45"}

    def test_certificate_always_present(self, client):
        for objective in ("maxmin-utility", "maxmin-rent", "minmax-utility", "minmax-rent"):
            resp = client.post("/v1/solve", json={"economy": e2_doc(), "objective": objective})
            assert resp.status_code == 200
            assert resp.json()["certificate"]["ok"] is True

    def test_bad_economy_is_stable_code(self, client):
        doc = e1_doc()
        doc["total_rent"] = "nope"
        resp = client.post("/v1/solve", json={"economy": doc})
        assert resp.status_code == 400
        assert resp.json()["code"] == "invalid_rational"

    def test_unknown_objective(self, client):
        resp = client.post("/v1/solve", json={"economy": e1_doc(), "objective": "leximin"})
        assert resp.status_code == 400
        assert resp.json()["code"] == "objective_invalid"


class TestVerifyEndpoint:
    def test_verify_maxmin_point(self, client):
        allocation = {"assignment": {"1": "a", "2": "b"}, "rents": {"a": "65", "b": "35"}}
        resp = client.post("/v1/verify", json={"economy": e1_doc(), "allocation": allocation})
        body = resp.json()
        assert body["envy_free"] is True
        assert body["certificate"]["is_maxmin"] is True

    def test_verify_envy(self, client):
        allocation = {"assignment": {"1": "a", "2": "b"}, "rents": {"a": "80", "b": "20"}}
        body = client.post(
            "/v1/verify", json={"economy": e1_doc(), "allocation": allocation}
        ).json()
        assert body["envy_free"] is False
        assert body["witness"] == {"envious": "1", "envied": "2", "gap": "20"}

    def test_verify_mismatch(self, client):
        allocation = {"assignment": {"1": "a", "2": "a"}, "rents": {"a": "80", "b": "20"}}
        resp = client.post("/v1/verify", json={"economy": e1_doc(), "allocation": allocation})
        assert resp.status_code == 400
        assert resp.json()["code"] == "allocation_mismatch"


def drive_section3_session(client, store_suffix=""):
    created = client.post(
        "/v1/sessions",
        json={
            "agents": ["alice", "bob"],
            "rooms": ["a", "b"],
            "total_rent": "800",
            "rho_menu": ["0", "1"],
            "rho_bar": "110",
        },
    )
    assert created.status_code == 200
    sid = created.json()["session_id"]

    def answer(payload, agent=None):
        body = {"payload": payload}
        if agent:
            body["agent"] = agent
        resp = client.post(f"/v1/sessions/{sid}/answer", json=body)
        assert resp.status_code == 200, resp.json()
        return resp.json()

    q = client.get(f"/v1/sessions/{sid}/question").json()["question"]
    assert q["agent"] == "alice" and q["kind"] == "rents"
    answer({"rents": {"a": "500", "b": "300"}}, agent="alice")
    step = answer({"budget": "400"}, agent="alice")
    assert step["question"]["kind"] == "rho_equivalent"
    assert step["question"]["fields"]["probe"] == "101"
    step = answer({"equivalent": "201"}, agent="alice")
    assert step["question"]["agent"] == "bob"
    answer({"rents": {"a": "450", "b": "350"}}, agent="bob")
    final = answer({"budget": "800"}, agent="bob")
    assert final["done"] is True
    return sid


class TestSessionEndpoints:
    def test_full_session_and_solve(self, client):
        sid = drive_section3_session(client)
        resp = client.post(f"/v1/sessions/{sid}/solve", json={})
        assert resp.status_code == 200
        body = resp.json()
        economy = body["economy"]
        alice = next(a for a in economy["agents"] if a["id"] == "alice")
        assert alice["values"] == {"a": "600", "b": "300"}
        assert alice["rho"] == "1"
        assert body["certificate"]["ok"] is True
        rents = body["allocation"]["rents"]
        assert sum(F(v) for v in rents.values()) == F(800)

    def test_unknown_session_404(self, client):
        resp = client.get("/v1/sessions/nope/question")
        assert resp.status_code == 404
        assert resp.json()["code"] == "session_not_found"

    def test_bad_answer_keeps_session_state(self, client):
        created = client.post(
            "/v1/sessions",
            json={
                "agents": ["x"],
                "rooms": ["r"],
                "total_rent": "100",
                "rho_menu": ["0"],
                "rho_bar": "0",
            },
        ).json()
        sid = created["session_id"]
        resp = client.post(
            f"/v1/sessions/{sid}/answer", json={"payload": {"rents": {"r": "99"}}}
        )
        assert resp.status_code == 400
        assert resp.json()["code"] == "rent_sum_mismatch"
        q = client.get(f"/v1/sessions/{sid}/question").json()["question"]
        assert q["kind"] == "rents"

    def test_file_backed_store(self, tmp_path):
        store = FileSessionStore(str(tmp_path))
        client = TestClient(create_app(store))
        sid = drive_section3_session(client)
        # a fresh app over the same directory sees the finished session
        client2 = TestClient(create_app(FileSessionStore(str(tmp_path))))
        resp = client2.post(f"/v1/sessions/{sid}/solve", json={})
        assert resp.status_code == 200
        assert resp.json()["certificate"]["ok"] is True

    def test_incomplete_session_solve_rejected(self, client):
        created = client.post(
            "/v1/sessions",
            json={
                "agents": ["x"],
                "rooms": ["r"],
                "total_rent": "100",
                "rho_menu": ["0"],
                "rho_bar": "0",
            },
        ).json()
        resp = client.post(f"/v1/sessions/{created['session_id']}/solve", json={})
        assert resp.status_code == 400
        assert resp.json()["code"] == "session_incomplete"
