import json
import time

import pytest
from fastapi.testclient import TestClient

from chute.instances import generate_instance, serialize_instance
from chute.service import create_app

TOY = {
    "format": "momkp-v1", "name": "TOY", "k": 2, "n": 2, "m": 1,
    "objectives": [[4, 1], [1, 4]], "constraints": [[1, 1]], "rhs": [1],
}


def wait_job(client, job_id, timeout=30.0):
    t0 = time.time()
    while time.time() - t0 < timeout:
        doc = client.get(f"/jobs/{job_id}").json()
        if doc["status"] in ("done", "error"):
            return doc
        time.sleep(0.02)
    raise TimeoutError(f"job {job_id} did not finish")


def navigate(client, session_id, lam, **overrides):
    body = {"lambda": lam, **overrides}
    resp = client.post(f"/sessions/{session_id}/navigate", json=body)
    assert resp.status_code == 202, resp.text
    doc = wait_job(client, resp.json()["job_id"])
    assert doc["status"] == "done", doc
    return doc["result"]


@pytest.fixture
def client(tmp_path):
    app = create_app(str(tmp_path / "data"))
    with TestClient(app) as c:
        yield c


class TestInstances:
    def test_upload(self, client):
        resp = client.post("/instances", content=json.dumps(TOY))
        assert resp.status_code == 201
        assert "instance_id" in resp.json()

    def test_malformed_is_400(self, client):
        resp = client.post("/instances", content="{not json")
        assert resp.status_code == 400
        body = resp.json()
        assert set(body) == {"code", "message"}

    def test_oversized_is_413(self, client):
        big = dict(TOY)
        big["name"] = "x" * 2_100_000
        resp = client.post("/instances", content=json.dumps(big))
        assert resp.status_code == 413


class TestSessions:
    def test_create_with_inline_instance(self, client):
        resp = client.post("/sessions", json={"instance": TOY})
        assert resp.status_code == 201
        doc = resp.json()
        assert doc["k"] == 2
        assert len(doc["y_star"]) == 2

    def test_duplicate_creates_get_distinct_ids(self, client):
        a = client.post("/sessions", json={"instance": TOY}).json()["session_id"]
        b = client.post("/sessions", json={"instance": TOY}).json()["session_id"]
        assert a != b

    def test_unknown_instance_id_is_400(self, client):
        resp = client.post("/sessions", json={"instance_id": "nope"})
        assert resp.status_code == 400

    def test_budgets_are_clamped(self, client):
        resp = client.post("/sessions", json={"instance": TOY,
                                              "config": {"tl": 10_000, "ts": 10_000}})
        assert resp.status_code == 201
        cfg = resp.json()["config"]
        assert cfg["tl"] <= 30.0 and cfg["ts"] <= 30.0


class TestNavigate:
    def test_first_navigation_sandwich(self, client):
        sid = client.post("/sessions", json={"instance": TOY}).json()["session_id"]
        result = navigate(client, sid, [0.5, 0.5])
        # exact optimum outcome of TOY for lambda (.5,.5) is (4, 1)
        for l, f in enumerate((4.0, 1.0)):
            assert result["L"][l] <= f + 1e-9
            assert f <= result["U"][l] + 1e-9
        assert result["reused_members"] == 0

    def test_second_navigation_reuses_and_never_loosens(self, client):
        sid = client.post("/sessions", json={"instance": TOY}).json()["session_id"]
        navigate(client, sid, [0.5, 0.5])
        second = navigate(client, sid, [0.4, 0.6])
        assert second["reused_members"] >= 0
        # a history-free rerun on a fresh session gives the baseline U
        sid2 = client.post("/sessions", json={"instance": TOY}).json()["session_id"]
        baseline = navigate(client, sid2, [0.4, 0.6])
        for a, b in zip(second["U"], baseline["U"]):
            assert a <= b + 1e-9

    def test_unknown_session_404(self, client):
        resp = client.post("/sessions/nope/navigate", json={"lambda": [0.5, 0.5]})
        assert resp.status_code == 404

    def test_zero_component_lambda_422(self, client):
        sid = client.post("/sessions", json={"instance": TOY}).json()["session_id"]
        resp = client.post(f"/sessions/{sid}/navigate", json={"lambda": [0.5, 0.5, 0.0]})
        assert resp.status_code == 422

    def test_wrong_k_422(self, client):
        sid = client.post("/sessions", json={"instance": TOY}).json()["session_id"]
        resp = client.post(f"/sessions/{sid}/navigate",
                           json={"lambda": [0.2, 0.3, 0.5]})
        assert resp.status_code == 422

    def test_queue_full_503(self, tmp_path):
        app = create_app(str(tmp_path / "data"), queue_limit=1)
        with TestClient(app) as client:
            inst = generate_instance(2, 24, 3, seed=7, name="SLOW")
            sid = client.post("/sessions", json={
                "instance": json.loads(serialize_instance(inst)),
                "config": {"tl": 5, "ts": 0.2},
            }).json()["session_id"]
            codes = []
            for _ in range(6):
                resp = client.post(f"/sessions/{sid}/navigate",
                                   json={"lambda": [0.5, 0.5], "gamma": 50})
                codes.append(resp.status_code)
            assert 503 in codes


class TestFrontAndHistory:
    def test_fresh_session_front_is_empty(self, client):
        sid = client.post("/sessions", json={"instance": TOY}).json()["session_id"]
        front = client.get(f"/sessions/{sid}/front").json()
        assert front["lower"] == [] and front["upper"] == []
        assert len(front["y_star"]) == 2

    def test_front_accumulates_and_is_stable_between_reads(self, client):
        sid = client.post("/sessions", json={"instance": TOY}).json()["session_id"]
        navigate(client, sid, [0.5, 0.5])
        navigate(client, sid, [0.3, 0.7])
        a = client.get(f"/sessions/{sid}/front").json()
        b = client.get(f"/sessions/{sid}/front").json()
        assert a == b
        assert len(a["history"]) == 2
        assert len(a["lower"]) >= 1

    def test_history_endpoint(self, client):
        sid = client.post("/sessions", json={"instance": TOY}).json()["session_id"]
        navigate(client, sid, [0.5, 0.5])
        doc = client.get(f"/sessions/{sid}/history").json()
        assert len(doc["entries"]) == 1
        entry = doc["entries"][0]
        assert entry["lambda"] == [0.5, 0.5]
        assert "intervals" in entry and "gap" in entry

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope/front").status_code == 404
        assert client.get("/jobs/nope").status_code == 404

    def test_cross_origin_reads_allowed(self, client):
        resp = client.get("/jobs/nope", headers={"origin": "http://localhost:5173"})
        assert resp.headers.get("access-control-allow-origin") == "*"


class TestRecovery:
    def test_orphaned_session_log_is_skipped(self, tmp_path):
        data = tmp_path / "data"
        app = create_app(str(data))
        with TestClient(app) as client:
            sid = client.post("/sessions", json={"instance": TOY}).json()["session_id"]
        for path in (data / "instances").glob("*.json"):
            path.unlink()
        app2 = create_app(str(data))
        with TestClient(app2) as client2:
            assert client2.get(f"/sessions/{sid}/front").status_code == 404

    def test_front_identical_after_restart(self, tmp_path):
        data = str(tmp_path / "data")
        app = create_app(data)
        with TestClient(app) as client:
            sid = client.post("/sessions", json={"instance": TOY}).json()["session_id"]
            navigate(client, sid, [0.5, 0.5])
            navigate(client, sid, [0.4, 0.6])
            before = client.get(f"/sessions/{sid}/front").json()
        app2 = create_app(data)
        with TestClient(app2) as client2:
            after = client2.get(f"/sessions/{sid}/front").json()
        assert before == after
