import time

import pytest
from fastapi.testclient import TestClient

from gridarena import xmlio
from gridarena.grid.topology import Cluster, GridTopology
from gridarena.service import Platform, create_app
from gridarena.statusmap import status_from_xml
from gridarena.tournament import manifest_to_xml

from conftest import build_manifest


@pytest.fixture
def platform(tmp_path):
    topo = GridTopology((Cluster("c0", 2), Cluster("c1", 2)))
    return Platform(tmp_path / "data", topo, backend="local")


@pytest.fixture
def client(platform):
    with TestClient(create_app(platform)) as c:
        yield c


def post_manifest(client, manifest):
    return client.post("/experiments", content=xmlio.to_bytes(manifest_to_xml(manifest)))


def wait_terminal(client, experiment_id, timeout=30.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        root = xmlio.parse_text(client.get(f"/experiments/{experiment_id}").text)
        if root.attrib["state"] in ("COMPLETED", "FAILED"):
            return root.attrib["state"]
        time.sleep(0.05)
    raise TimeoutError(f"{experiment_id} did not finish")


def test_create_and_run_experiment(client):
    manifest = build_manifest(4, games=5, experiment_id="svc1")
    response = post_manifest(client, manifest)
    assert response.status_code == 201
    assert xmlio.parse_text(response.text).attrib["id"] == "svc1"

    listing = xmlio.parse_text(client.get("/experiments").text)
    assert [e.attrib["id"] for e in listing] == ["svc1"]
    assert listing[0].attrib["state"] == "CREATED"

    assert client.post("/experiments/svc1/start").status_code == 200
    assert wait_terminal(client, "svc1") == "COMPLETED"

    status = status_from_xml(xmlio.parse_text(client.get("/experiments/svc1").text))
    assert all(s.state == "DONE" for _, s in status.all_jobs())


def test_create_rejects_invalid_manifest(client):
    manifest = build_manifest(2, experiment_id="bad")
    bad = manifest.__class__(
        experiment_id="bad",
        game_id="rsp",
        agents=manifest.agents[:1],  # one agent only
        games_per_match=5,
    )
    response = post_manifest(client, bad)
    assert response.status_code == 422
    error = xmlio.parse_text(response.text)
    assert error.attrib["code"] == "invalid_manifest"
    assert "at least 2 agents" in error.attrib["message"]


def test_duplicate_create_conflicts(client):
    manifest = build_manifest(2, experiment_id="dup")
    assert post_manifest(client, manifest).status_code == 201
    assert post_manifest(client, manifest).status_code == 409


def test_unknown_ids_are_404(client):
    assert client.get("/experiments/nope").status_code == 404
    assert client.post("/experiments/nope/start").status_code == 404
    assert client.get("/jobs/nope").status_code == 404
    assert client.post("/jobs/nope/resubmit").status_code == 404
    assert client.get("/experiments/nope/report").status_code == 404


def test_lifecycle_conflicts(client):
    manifest = build_manifest(2, games=3, experiment_id="lc")
    post_manifest(client, manifest)
    # report before completion is a conflict (still CREATED)
    assert client.get("/experiments/lc/report").status_code == 409
    client.post("/experiments/lc/start")
    wait_terminal(client, "lc")
    # starting a completed experiment is a conflict
    assert client.post("/experiments/lc/start").status_code == 409
    assert client.post("/experiments/lc/pause").status_code == 409


def test_job_listing_filter_and_detail(client):
    manifest = build_manifest(4, games=4, experiment_id="jobs1")
    post_manifest(client, manifest)
    client.post("/experiments/jobs1/start")
    wait_terminal(client, "jobs1")

    done = xmlio.parse_text(client.get("/experiments/jobs1/jobs", params={"state": "DONE"}).text)
    assert len(done) == 6
    assert all(j.attrib["state"] == "DONE" for j in done)
    empty = xmlio.parse_text(client.get("/experiments/jobs1/jobs", params={"state": "FAILED"}).text)
    assert len(empty) == 0
    assert client.get("/experiments/jobs1/jobs", params={"state": "bogus"}).status_code == 422

    job_id = done[0].attrib["job_id"]
    detail = xmlio.parse_text(client.get(f"/jobs/{job_id}").text)
    transitions = detail.findall("transition")
    assert [t.attrib["state"] for t in transitions] == [
        "SUBMITTED",
        "MATCHED",
        "STAGING_IN",
        "RUNNING",
        "STAGING_OUT",
        "DONE",
    ]
    assert detail.find("log") is not None
    assert "DONE" in detail.find("log").text


def test_report_and_usage(client):
    manifest = build_manifest(4, games=4, experiment_id="rep1")
    post_manifest(client, manifest)
    client.post("/experiments/rep1/start")
    wait_terminal(client, "rep1")

    report = xmlio.parse_text(client.get("/experiments/rep1/report").text)
    assert report.attrib["state"] == "COMPLETED"
    totals = report.find("totals")
    assert totals.attrib["matches"] == "6"
    assert report.find("baseline").attrib["sequential_hours"] == "26000.0"

    usage = xmlio.parse_text(client.get("/grid/usage").text)
    exp = usage.find("experiment")
    assert exp.attrib["id"] == "rep1"
    clusters = exp.findall("cluster")
    assert {c.attrib["id"] for c in clusters} == {"c0", "c1"}
    assert sum(int(c.attrib["jobs_run"]) for c in clusters) >= 6


def test_event_stream_replays_and_resumes(client):
    manifest = build_manifest(3, games=3, experiment_id="ev1")
    post_manifest(client, manifest)
    client.post("/experiments/ev1/start")
    wait_terminal(client, "ev1")

    lines = []
    with client.stream("GET", "/events", params={"since": 0}) as response:
        for line in response.iter_lines():
            if line.startswith("data: "):
                lines.append(line[len("data: "):].split())
    assert lines, "no events streamed"
    seqs = [int(f[0]) for f in lines]
    assert seqs == sorted(seqs) and len(set(seqs)) == len(seqs)

    # resuming from a midpoint yields exactly the suffix
    midpoint = seqs[len(seqs) // 2]
    with client.stream("GET", "/events", params={"since": midpoint}) as response:
        tail = [l[len("data: "):].split() for l in response.iter_lines() if l.startswith("data: ")]
    assert [int(f[0]) for f in tail] == [s for s in seqs if s > midpoint]

    # stream replay reconstructs the final status map
    final_state = {}
    exp_state = None
    for fields in lines:
        seq, exp, job_id, old, new, t = fields
        if job_id == "-":
            exp_state = new
        else:
            final_state[job_id] = new
    status = status_from_xml(xmlio.parse_text(client.get("/experiments/ev1").text))
    assert exp_state == status.state.value == "COMPLETED"
    by_job = {s.job_id: s.state for _, s in status.all_jobs() if s.job_id}
    assert final_state == by_job


def test_token_auth(platform):
    with TestClient(create_app(platform, api_token="hunter2")) as client:
        assert client.get("/experiments").status_code == 401
        assert (
            client.get("/experiments", headers={"x-api-token": "wrong"}).status_code == 401
        )
        ok = client.get("/experiments", headers={"x-api-token": "hunter2"})
        assert ok.status_code == 200
        assert client.get("/healthz").status_code == 200  # unauthenticated probe


def test_repeated_get_without_transitions_identical(client):
    manifest = build_manifest(2, games=2, experiment_id="idem")
    post_manifest(client, manifest)
    client.post("/experiments/idem/start")
    wait_terminal(client, "idem")
    body1 = client.get("/experiments/idem").text
    body2 = client.get("/experiments/idem").text
    assert body1 == body2
    report1 = client.get("/experiments/idem/report").text
    report2 = client.get("/experiments/idem/report").text
    assert report1 == report2
