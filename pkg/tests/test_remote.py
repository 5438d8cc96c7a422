import pytest
import requests

import api
from buffer import qalloc
from client import RemoteAccelerator, remote_poll, remote_submit
from config import ENDPOINT_ENV
from conftest import BELL_QUIL
from errors import FrameworkError, HttpError, JobNotFound
from ir import CompositeNode, create_instruction
from quil import QuilCompiler
from server import JobStore, Server
from simulator import StatevectorSimulator


def bell():
    return QuilCompiler().compile(BELL_QUIL).get_composite("bell")


class TestRemoteAccelerator:
    def test_matches_local_simulator(self, framework, reference_server):
        options = {"shots": 1024, "seed": 7}
        remote = api.get_accelerator("remote", {"endpoint": reference_server.endpoint, **options})
        remote_buffer = qalloc(2)
        remote.execute(remote_buffer, bell())

        local_buffer = qalloc(2)
        StatevectorSimulator().initialize(options).execute(local_buffer, bell())

        assert remote_buffer.measurement_counts() == local_buffer.measurement_counts()
        assert set(remote_buffer.measurement_counts()) <= {"00", "11"}
        assert remote_buffer["shots"] == 1024
        assert remote_buffer["measured-qubits"] == [0, 1]
        assert remote.is_remote()

    def test_exact_mode_round_trip(self, reference_server):
        remote = RemoteAccelerator().initialize({"endpoint": reference_server.endpoint})
        buffer = qalloc(2)
        remote.execute(buffer, bell())
        assert buffer.measurement_counts() == {}
        assert buffer.expectation_value_z() == pytest.approx(1.0)

    def test_batch(self, reference_server):
        remote = RemoteAccelerator().initialize({"endpoint": reference_server.endpoint, "shots": 100, "seed": 1})
        flip = CompositeNode("flip", [], [create_instruction("X", [0])])
        buffer = qalloc(2)
        remote.execute(buffer, [bell(), flip])
        assert [label for label, _ in buffer.children] == ["bell", "flip"]
        assert buffer.get_children("flip")[0].measurement_counts() == {"10": 100}

    def test_failed_job(self, reference_server):
        remote = RemoteAccelerator().initialize({"endpoint": reference_server.endpoint, "shots": 10})
        program = CompositeNode("wide", [], [create_instruction("X", [3])])
        with pytest.raises(FrameworkError, match="failed"):
            remote.execute(qalloc(1), program)

    def test_session_opened_on_first_job(self, reference_server):
        remote = RemoteAccelerator().initialize({"endpoint": reference_server.endpoint, "shots": 5})
        assert remote.session is None
        remote.execute(qalloc(2), bell())
        assert isinstance(remote.session, requests.Session)

    def test_endpoint_from_environment(self, monkeypatch):
        monkeypatch.setenv(ENDPOINT_ENV, "http://example.invalid:9000/")
        assert RemoteAccelerator().initialize({}).endpoint() == "http://example.invalid:9000"
        explicit = RemoteAccelerator().initialize({"endpoint": "http://127.0.0.1:1234"})
        assert explicit.endpoint() == "http://127.0.0.1:1234"


class TestWireProtocol:
    def test_submit_and_poll(self, reference_server):
        job_id = remote_submit(reference_server.endpoint, bell(), {"shots": 50, "seed": 3}, size=2)
        data = remote_poll(reference_server.endpoint, job_id, timeout=10)
        assert data["status"] == "done"
        assert sum(data["counts"].values()) == 50
        assert data["metadata"]["shots"] == 50

    def test_unknown_job(self, reference_server):
        with pytest.raises(JobNotFound):
            remote_poll(reference_server.endpoint, "no-such-job")

    def test_malformed_body(self, reference_server):
        resp = requests.post(
            f"{reference_server.endpoint}/jobs",
            data="{not json",
            headers={"Content-Type": "application/json"},
            timeout=5,
        )
        assert resp.status_code == 400
        assert "error" in resp.json()

    @pytest.mark.parametrize(
        "body",
        [
            {"shots": -1, "program": {"kind": "composite", "name": "k"}},
            {"shots": "many", "program": {"kind": "composite", "name": "k"}},
            {"shots": True, "program": {"kind": "composite", "name": "k"}},
            {"shots": 10, "seed": 1.5, "program": {"kind": "composite", "name": "k"}},
            {"shots": 10, "size": 0, "program": {"kind": "composite", "name": "k"}},
            {"shots": 10, "program": {"kind": "bogus"}},
            {
                "shots": 10,
                "program": {
                    "kind": "composite",
                    "name": "k",
                    "children": [{"kind": "instruction", "name": "FOO", "bits": [0], "params": [], "enabled": True}],
                },
            },
            {"shots": 10},
        ],
    )
    def test_rejected_bodies(self, reference_server, body):
        resp = requests.post(f"{reference_server.endpoint}/jobs", json=body, timeout=5)
        assert resp.status_code == 400

    def test_non_object_body(self, reference_server):
        resp = requests.post(f"{reference_server.endpoint}/jobs", json=[1, 2], timeout=5)
        assert resp.status_code == 400

    def test_unknown_route(self, reference_server):
        assert requests.get(f"{reference_server.endpoint}/status", timeout=5).status_code == 404
        assert requests.post(f"{reference_server.endpoint}/jobs/abc", json={}, timeout=5).status_code == 404

    def test_server_down(self):
        server = Server(port=0)
        endpoint = server.endpoint
        server.stop()
        with pytest.raises(HttpError) as info:
            remote_submit(endpoint, bell(), {"shots": 1})
        assert info.value.status is None

    def test_context_manager(self):
        with Server(port=0) as server:
            job_id = remote_submit(server.endpoint, bell(), {"shots": 5}, size=2)
            remote_poll(server.endpoint, job_id, timeout=10)
            assert len(server.jobs) == 1

    def test_unknown_gate_keeps_server_alive(self, reference_server):
        program = bell().to_json()
        program["children"][0]["name"] = "FOO"
        resp = requests.post(f"{reference_server.endpoint}/jobs", json={"shots": 10, "program": program}, timeout=5)
        assert resp.status_code == 400
        assert "FOO" in resp.json()["error"]
        job_id = remote_submit(reference_server.endpoint, bell(), {"shots": 5}, size=2)
        assert remote_poll(reference_server.endpoint, job_id, timeout=10)["status"] == "done"


class TestJobStore:
    def test_oldest_finished_jobs_dropped(self):
        jobs = JobStore(limit=2)
        first = jobs.create({})
        second = jobs.create({})
        jobs.update(first, status="done")
        third = jobs.create({})
        assert jobs.get(first) is None
        assert jobs.get(second)["status"] == "queued"
        assert len(jobs) == 2 and jobs.get(third) is not None

    def test_pending_jobs_never_dropped(self):
        jobs = JobStore(limit=1)
        ids = [jobs.create({}) for _ in range(3)]
        assert all(jobs.get(job_id) is not None for job_id in ids)
