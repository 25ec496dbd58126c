import itertools

import pytest

from gridarena.characters import AgentCharacter, TdParams
from gridarena.games.rsp import RspWorkload
from gridarena.grid.engine import (
    EngineStalled,
    GridEngine,
    LocalThreadPoolExecutor,
    SynchronousExecutor,
)
from gridarena.grid.failures import FailurePolicy, Phase
from gridarena.grid.jobs import (
    LEGAL_TRANSITIONS,
    ArtifactRef,
    JobSpec,
    JobState,
    WorkloadCall,
)
from gridarena.grid.storage import digest_of
from gridarena.grid.topology import Cluster, GridTopology, single_cluster
from gridarena.results import result_from_bytes


def make_engine(topology=None, **kwargs):
    return GridEngine(topology or single_cluster(2), **kwargs)


def sim_spec(engine, spec_id, compute=60.0, input_blobs=(), outputs=("out",)):
    refs = []
    for i, blob in enumerate(input_blobs):
        ref = engine.central_se.put(blob)
        refs.append(ArtifactRef(f"in{i}", ref, len(blob)))
    return JobSpec(
        job_spec_id=spec_id,
        input_refs=tuple(refs),
        output_names=tuple(f"{spec_id}/{o}" for o in outputs),
        compute_seconds=compute,
    )


def test_submit_creates_submitted_record_with_unique_ids():
    eng = make_engine()
    spec = sim_spec(eng, "s1")
    j1 = eng.submit(spec)
    j2 = eng.submit(spec)
    assert j1 != j2
    assert eng.query_status(j1).state is JobState.SUBMITTED
    assert eng.query_status(j1).attempt == 1


def test_submit_rejects_missing_input_blob():
    eng = make_engine()
    ref = ArtifactRef("weights", digest_of(b"nope"), 4)
    spec = JobSpec("s1", (ref,), ("s1/out",), 1.0)
    with pytest.raises(KeyError, match="weights"):
        eng.submit(spec)


def test_zero_size_input_rejected_at_validation():
    spec = JobSpec("s1", (ArtifactRef("empty", digest_of(b""), 0),), ("o",), 1.0)
    with pytest.raises(ValueError, match="size"):
        spec.validate()


def test_unresolved_input_rejected():
    spec = JobSpec("s1", (ArtifactRef("pending"),), ("o",), 1.0)
    with pytest.raises(ValueError, match="unresolved"):
        spec.validate()


def test_single_job_runs_to_done_with_six_monotone_timestamps():
    eng = make_engine()
    j = eng.submit(sim_spec(eng, "s1", compute=60.0, outputs=()))
    eng.run_until_idle()
    rec = eng.query_status(j)
    assert rec.state is JobState.DONE
    states = [s for s, _, _ in rec.timestamps]
    assert states == [
        JobState.SUBMITTED,
        JobState.MATCHED,
        JobState.STAGING_IN,
        JobState.RUNNING,
        JobState.STAGING_OUT,
        JobState.DONE,
    ]
    stamps = [(t, seq) for _, t, seq in rec.timestamps]
    assert stamps == sorted(stamps) and len(set(stamps)) == 6
    assert rec.state_time(JobState.DONE) == 60.0
    assert eng.usage_stats().makespan == 60.0


def test_unknown_job_id_not_found():
    eng = make_engine()
    with pytest.raises(KeyError, match="unknown job"):
        eng.query_status("j-999999")


def test_stage_in_duration_is_size_over_min_bandwidth():
    topo = GridTopology(
        (Cluster("c0", 1, local_se_bandwidth=1_000_000.0),),
        central_se_bandwidth=2_000_000.0,
    )
    eng = GridEngine(topo)
    blobs = (b"x" * 1_000_000, b"y" * 1_000_000)
    j = eng.submit(sim_spec(eng, "s1", compute=0.0, input_blobs=blobs, outputs=()))
    eng.run_until_idle()
    rec = eng.query_status(j)
    # 2 MB over min(2 MB/s, 1 MB/s) = 2 s of staging
    assert rec.state_time(JobState.RUNNING) - rec.state_time(JobState.STAGING_IN) == 2.0
    assert rec.state is JobState.DONE


def test_compute_duration_scales_with_speed_factor():
    eng = GridEngine(GridTopology((Cluster("slow", 1, wn_speed_factor=2.0),)))
    j = eng.submit(sim_spec(eng, "s1", compute=60.0))
    eng.run_until_idle()
    rec = eng.query_status(j)
    assert rec.state_time(JobState.STAGING_OUT) - rec.state_time(JobState.RUNNING) == 120.0


def test_wms_prefers_least_loaded_then_fastest_then_id():
    # exhaustive 2-cluster case table over small loads and two speeds
    for load_a, load_b, speed_a, speed_b in itertools.product(
        range(3), range(3), (1.0, 2.0), (1.0, 2.0)
    ):
        eng = GridEngine(
            GridTopology(
                (
                    Cluster("a", 1, wn_speed_factor=speed_a),
                    Cluster("b", 1, wn_speed_factor=speed_b),
                )
            )
        )
        eng._active["a"] = load_a
        eng._active["b"] = load_b
        if (load_a, speed_a, "a") < (load_b, speed_b, "b"):
            expected = "a"
        else:
            expected = "b"
        assert eng._choose_cluster() == expected, (load_a, load_b, speed_a, speed_b)


def test_wms_single_cluster_always_chosen():
    eng = make_engine(single_cluster(1))
    for _ in range(3):
        eng.submit(sim_spec(eng, "s", compute=1.0))
    eng.run_until_idle()
    assert all(r.placement[0] == "c0" for r in eng.jobs())


def test_wms_balances_between_equal_clusters():
    topo = GridTopology((Cluster("a", 2), Cluster("b", 2)))
    eng = GridEngine(topo)
    for i in range(4):
        eng.submit(sim_spec(eng, f"s{i}", compute=10.0))
    eng.run_until_idle()
    placements = [r.placement[0] for r in eng.jobs()]
    assert placements == ["a", "b", "a", "b"]


def test_full_ce_queues_leave_job_submitted_until_capacity_frees():
    topo = GridTopology((Cluster("a", 1, ce_queue_capacity=1),))
    eng = GridEngine(topo)
    ids = [eng.submit(sim_spec(eng, f"s{i}", compute=5.0, outputs=())) for i in range(4)]
    eng.run_until_idle()
    assert all(eng.query_status(j).state is JobState.DONE for j in ids)
    # serial 1-WN cluster: 4 jobs x 5 s
    assert eng.usage_stats().makespan == 20.0


def test_rerun_of_identical_job_yields_identical_output_digests():
    def run_once():
        eng = make_engine()
        j = eng.submit(sim_spec(eng, "s1", compute=1.0, outputs=("r", "na", "nb")))
        eng.run_until_idle()
        return [r.digest for r in eng.query_status(j).output_refs]

    assert run_once() == run_once()


def test_three_outputs_all_visible_centrally_after_done():
    eng = make_engine()
    j = eng.submit(sim_spec(eng, "s1", compute=1.0, outputs=("r", "na", "nb")))
    eng.run_until_idle()
    rec = eng.query_status(j)
    assert len(rec.output_refs) == 3
    for ref in rec.output_refs:
        assert eng.central_se.has(ref.digest)


def test_stage_out_failure_publishes_nothing():
    eng = make_engine()
    spec = sim_spec(eng, "s1", compute=1.0, outputs=("r", "na", "nb"))
    j = eng.submit(spec)
    eng.injector.target(j, Phase.STAGE_OUT)
    eng.run_until_idle()
    rec = eng.query_status(j)
    assert rec.state is JobState.FAILED
    assert rec.failure_reason == "stage_out"
    assert len(eng.central_se) == 0
    assert rec.output_refs == ()


def test_stage_in_injected_failure():
    eng = make_engine()
    j = eng.submit(sim_spec(eng, "s1", compute=1.0, input_blobs=(b"data",)))
    eng.injector.target(j, Phase.STAGE_IN)
    eng.run_until_idle()
    rec = eng.query_status(j)
    assert rec.state is JobState.FAILED and rec.failure_reason == "stage_in"


def test_digest_mismatch_fails_stage_in():
    eng = make_engine()
    blob = b"weights-v1"
    j = eng.submit(sim_spec(eng, "s1", compute=1.0, input_blobs=(blob,)))
    eng.central_se.blobs[digest_of(blob)] = b"corrupted"
    eng.run_until_idle()
    rec = eng.query_status(j)
    assert rec.state is JobState.FAILED and rec.failure_reason == "stage_in"


def test_injected_crash_discards_outputs_and_reports_reason():
    eng = make_engine()
    j = eng.submit(sim_spec(eng, "s1", compute=10.0))
    eng.injector.target(j, Phase.RUNNING, kind="node_lost")
    eng.run_until_idle()
    rec = eng.query_status(j)
    assert rec.state is JobState.FAILED and rec.failure_reason == "node_lost"
    assert len(eng.central_se) == 0


def test_resubmit_bumps_attempt_and_succeeds():
    eng = make_engine()
    j1 = eng.submit(sim_spec(eng, "s1", compute=1.0))
    eng.injector.target(j1, Phase.RUNNING)
    eng.run_until_idle()
    assert eng.query_status(j1).state is JobState.FAILED
    j2 = eng.resubmit(j1)
    eng.run_until_idle()
    rec = eng.query_status(j2)
    assert rec.state is JobState.DONE and rec.attempt == 2
    with pytest.raises(ValueError, match="FAILED"):
        eng.resubmit(j2)


def test_cancel_only_before_staging():
    eng = make_engine(single_cluster(1))
    j1 = eng.submit(sim_spec(eng, "s1", compute=5.0))
    j2 = eng.submit(sim_spec(eng, "s2", compute=5.0))
    eng.cancel(j2)  # still SUBMITTED
    eng.run_until_idle()
    assert eng.query_status(j2).state is JobState.CANCELLED
    assert eng.query_status(j1).state is JobState.DONE
    with pytest.raises(ValueError, match="cannot cancel"):
        eng.cancel(j1)


def test_policy_p_zero_never_fails():
    eng = make_engine(single_cluster(10), failure_policy=FailurePolicy(p=0.0, seed=1))
    for i in range(1000):
        eng.submit(sim_spec(eng, f"s{i}", compute=1.0))
    eng.run_until_idle()
    assert all(r.state is JobState.DONE for r in eng.jobs())


def test_policy_p_one_in_running_fails_every_first_attempt():
    eng = make_engine(
        single_cluster(10), failure_policy=FailurePolicy(p=1.0, phase=Phase.RUNNING, seed=1)
    )
    for i in range(50):
        eng.submit(sim_spec(eng, f"s{i}", compute=1.0))
    eng.run_until_idle()
    assert all(
        r.state is JobState.FAILED and r.failure_reason == "runtime" for r in eng.jobs()
    )


def test_policy_p_03_failure_count_within_binomial_bound():
    eng = make_engine(
        single_cluster(50), failure_policy=FailurePolicy(p=0.3, phase=Phase.RUNNING, seed=7)
    )
    for i in range(1000):
        eng.submit(sim_spec(eng, f"s{i}", compute=1.0))
    eng.run_until_idle()
    failed = sum(1 for r in eng.jobs() if r.state is JobState.FAILED)
    # binomial(1000, 0.3): 5 sigma ~ 72 around 300
    assert 228 <= failed <= 372, failed


def test_makespan_zero_without_jobs():
    eng = make_engine()
    eng.run_until_idle()
    assert eng.usage_stats().makespan == 0.0


def test_wave_scheduling_makespan_500_jobs_50_wns():
    eng = make_engine(single_cluster(50))
    for i in range(500):
        eng.submit(sim_spec(eng, f"s{i}", compute=60.0, outputs=()))
    eng.run_until_idle()
    assert eng.usage_stats().makespan == 600.0


def test_utilization_identity_and_accounting():
    topo = GridTopology((Cluster("a", 3), Cluster("b", 2)))
    eng = GridEngine(topo)
    for i in range(10):
        eng.submit(sim_spec(eng, f"s{i}", compute=7.0))
    eng.run_until_idle()
    stats = eng.usage_stats()
    for cid, cluster in (("a", topo.clusters[0]), ("b", topo.clusters[1])):
        usage = stats.per_cluster[cid]
        assert usage.busy_time + usage.idle_time == pytest.approx(
            cluster.wn_count * stats.makespan
        )
        assert usage.jobs_run > 0


def test_all_observed_transitions_are_legal_under_failures():
    eng = make_engine(single_cluster(5), failure_policy=FailurePolicy(p=0.4, seed=3))
    for i in range(200):
        eng.submit(sim_spec(eng, f"s{i}", compute=1.0, input_blobs=(b"blob",)))
    resubmitted = set()
    for _ in range(40):
        eng.run_until_idle()
        done_specs = {r.spec.job_spec_id for r in eng.jobs() if r.state is JobState.DONE}
        pending = [
            r
            for r in eng.jobs()
            if r.state is JobState.FAILED
            and r.job_id not in resubmitted
            and r.spec.job_spec_id not in done_specs
        ]
        if not pending:
            break
        for r in pending:
            resubmitted.add(r.job_id)
            eng.resubmit(r.job_id)
    assert all(
        r.spec.job_spec_id
        in {x.spec.job_spec_id for x in eng.jobs() if x.state is JobState.DONE}
        or r.state is JobState.DONE
        for r in eng.jobs()
    )
    by_job = {}
    for t in eng.transitions():
        if t.old_state is not None:
            assert (t.old_state, t.new_state) in LEGAL_TRANSITIONS
        prev = by_job.get(t.job_id)
        if prev is not None:
            assert (prev.time, prev.seq) < (t.time, t.seq)
        by_job[t.job_id] = t


def test_stall_detection_reports_instead_of_hanging():
    eng = make_engine()
    eng.submit(sim_spec(eng, "s1", compute=1.0))
    eng._heap.clear()  # simulate a lost event
    with pytest.raises(EngineStalled):
        eng.run_until_idle()


def _rsp_job(engine, agents, games=100, seed=5):
    wl = RspWorkload()
    char_a = AgentCharacter(agents[0], TdParams())
    char_b = AgentCharacter(agents[1], TdParams())
    art_a = wl.initial_artifact(char_a)
    art_b = wl.initial_artifact(char_b)
    refs = (
        ArtifactRef("a-in", engine.central_se.put(art_a), len(art_a)),
        ArtifactRef("b-in", engine.central_se.put(art_b), len(art_b)),
    )
    call = WorkloadCall(
        game_id="rsp",
        match_id="m1",
        character_a=char_a,
        character_b=char_b,
        games=games,
        seed=seed,
        input_a="a-in",
        input_b="b-in",
        output_result="m1/result",
        output_a="m1/a-out",
        output_b="m1/b-out",
    )
    return JobSpec(
        "m1", refs, ("m1/result", "m1/a-out", "m1/b-out"), compute_seconds=60.0, workload=call
    )


def fetch_result(engine, record):
    ref = next(r for r in record.output_refs if r.name.endswith("result"))
    return result_from_bytes(engine.central_se.get(ref.digest))


def test_real_rsp_job_produces_conserved_match_result():
    eng = make_engine()
    j = eng.submit(_rsp_job(eng, ("a", "b")))
    eng.run_until_idle()
    rec = eng.query_status(j)
    assert rec.state is JobState.DONE
    result = fetch_result(eng, rec)
    assert result.wins_a + result.wins_b + result.draws == result.games_played == 100


def test_backend_equivalence_sync_vs_thread_pool():
    payloads = []
    for executor in (SynchronousExecutor(), LocalThreadPoolExecutor(4)):
        eng = GridEngine(single_cluster(2), executor=executor)
        j = eng.submit(_rsp_job(eng, ("a", "b")))
        eng.run_until_idle()
        rec = eng.query_status(j)
        payloads.append(
            (
                fetch_result(eng, rec),
                [r.digest for r in rec.output_refs],
                [(s.value, t) for s, t, _ in rec.timestamps],
            )
        )
        eng.shutdown()
    assert payloads[0] == payloads[1]


def test_job_log_file_written_per_attempt(tmp_path):
    eng = GridEngine(single_cluster(1), log_dir=tmp_path)
    j1 = eng.submit(sim_spec(eng, "s1", compute=2.0))
    eng.injector.target(j1, Phase.RUNNING)
    eng.run_until_idle()
    j2 = eng.resubmit(j1)
    eng.run_until_idle()
    log1 = tmp_path / f"{j1}-a1.log"
    log2 = tmp_path / f"{j2}-a2.log"
    assert log1.exists() and log2.exists()
    lines = log1.read_text().splitlines()
    assert any("FAILED" in line for line in lines)
    assert all(line.split()[1] for line in lines)  # timestamp state detail
