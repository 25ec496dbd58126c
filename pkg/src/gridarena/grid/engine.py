"""Deterministic discrete-event grid engine.

One virtual clock drives the whole job lifecycle: WMS matching, staging
through storage elements, execution on worker nodes, and stage-out back to
the central store. Simultaneous events break ties by scheduling sequence
number, so a run is a pure function of (topology, submissions, seeds).

Execution backends plug in as executors. The synchronous executor computes
job payloads inline (pure simulation); the thread-pool executor dispatches
real match workloads to workers when a job's RUNNING phase opens and joins
the result when its virtual completion event fires, so wall-clock work
overlaps while every record stays deterministic.
"""

from __future__ import annotations

import heapq
import threading
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from gridarena.games.base import AgentConfig, WorkloadError, play_match, resolve_workload
from gridarena.grid.failures import FailureInjector, FailurePolicy, Phase
from gridarena.grid.jobs import ArtifactRef, JobRecord, JobSpec, JobState
from gridarena.grid.storage import StorageElement
from gridarena.grid.topology import GridTopology
from gridarena.results import result_to_bytes


class EngineStalled(RuntimeError):
    """No pending events but jobs are still non-terminal."""


@dataclass(frozen=True)
class Transition:
    seq: int
    job_id: str
    old_state: JobState | None
    new_state: JobState
    time: float


@dataclass
class ClusterUsage:
    jobs_run: int = 0
    busy_time: float = 0.0
    idle_time: float = 0.0
    bytes_staged_in: int = 0
    bytes_staged_out: int = 0
    failures: int = 0


@dataclass
class UsageStats:
    makespan: float
    per_cluster: dict[str, ClusterUsage] = field(default_factory=dict)


def execute_job_payload(spec: JobSpec, scratch: dict[str, bytes]) -> dict[str, bytes]:
    """Produce a job's outputs from its staged inputs.

    Jobs without a live workload emit deterministic placeholder blobs (the
    pure-simulation case); workload jobs really play the match.
    """
    if spec.workload is None:
        return {name: f"sim:{spec.job_spec_id}:{name}".encode() for name in spec.output_names}
    call = spec.workload
    workload = resolve_workload(call.game_id)
    config_a = AgentConfig(call.character_a, scratch[call.input_a])
    config_b = AgentConfig(call.character_b, scratch[call.input_b])
    result, art_a, art_b = play_match(
        workload, call.match_id, config_a, config_b, call.games, call.seed
    )
    return {
        call.output_result: result_to_bytes(result),
        call.output_a: art_a,
        call.output_b: art_b,
    }


class SynchronousExecutor:
    """Computes payloads inline while the virtual completion event fires."""

    def start(self, spec: JobSpec, scratch: dict[str, bytes]):
        return (spec, scratch)

    def finish(self, handle) -> dict[str, bytes]:
        spec, scratch = handle
        return execute_job_payload(spec, scratch)

    def shutdown(self) -> None:
        pass


class LocalThreadPoolExecutor:
    """Real parallel execution: dispatch at RUNNING, join at completion."""

    def __init__(self, max_workers: int):
        self._pool = ThreadPoolExecutor(max_workers=max_workers)

    def start(self, spec: JobSpec, scratch: dict[str, bytes]) -> Future:
        return self._pool.submit(execute_job_payload, spec, scratch)

    def finish(self, handle: Future) -> dict[str, bytes]:
        return handle.result()

    def shutdown(self) -> None:
        self._pool.shutdown(wait=False, cancel_futures=True)


class GridEngine:
    """Owns the job table, the event heap and all grid-side state.

    All mutations happen on the thread that steps the engine; readers take
    the snapshot lock, so status queries are consistent at any point.
    """

    def __init__(
        self,
        topology: GridTopology,
        executor=None,
        failure_policy: FailurePolicy | None = None,
        log_dir: str | Path | None = None,
        job_id_prefix: str = "",
    ):
        self.topology = topology
        self.job_id_prefix = job_id_prefix
        self.executor = executor or SynchronousExecutor()
        self.injector = FailureInjector(failure_policy)
        self.central_se = StorageElement("central")
        self.cluster_se = {c.cluster_id: StorageElement(c.cluster_id) for c in topology.clusters}
        self.log_dir = Path(log_dir) if log_dir else None

        self.clock = 0.0
        self._heap: list[tuple[float, int, Callable[[], None]]] = []
        self._event_seq = 0
        self._transition_seq = 0
        self._job_counter = 0
        self._records: dict[str, JobRecord] = {}
        self._submission_order: list[str] = []
        self._transitions: list[Transition] = []
        self._lock = threading.RLock()

        self._free_wns = {c.cluster_id: list(range(c.wn_count)) for c in topology.clusters}
        self._ce_queue: dict[str, list[str]] = {c.cluster_id: [] for c in topology.clusters}
        self._active: dict[str, int] = {c.cluster_id: 0 for c in topology.clusters}
        self._usage = {c.cluster_id: ClusterUsage() for c in topology.clusters}
        self._alloc_start: dict[str, float] = {}
        self._scratch: dict[str, dict[str, bytes]] = {}
        self._plans: dict[str, dict[Phase, str]] = {}
        self._handles: dict[str, object] = {}
        self._wms_scheduled = False
        self._last_terminal_time = 0.0

    # ---- submission API -------------------------------------------------

    def submit(self, spec: JobSpec, attempt: int = 1) -> str:
        spec.validate()
        for ref in spec.input_refs:
            if not self.central_se.has(ref.digest):
                raise KeyError(
                    f"input {ref.name!r} ({ref.digest}) of {spec.job_spec_id} "
                    "is not present in the central storage element"
                )
        return self._admit(spec, attempt=attempt)

    def resubmit(self, job_id: str) -> str:
        old = self._records[job_id]
        if old.state is not JobState.FAILED:
            raise ValueError(f"{job_id} is {old.state.value}, only FAILED jobs can be resubmitted")
        return self._admit(old.spec, attempt=old.attempt + 1)

    def submit_at(self, delay: float, spec: JobSpec, attempt: int = 1) -> None:
        """Schedule a submission after a virtual delay (resubmission backoff)."""
        self._schedule(delay, lambda: self.submit(spec, attempt=attempt))

    def cancel(self, job_id: str) -> None:
        record = self._records[job_id]
        if not record.can_transition(JobState.CANCELLED):
            raise ValueError(f"{job_id} is {record.state.value}, cannot cancel")
        for queue in self._ce_queue.values():
            if job_id in queue:
                queue.remove(job_id)
        if record.placement is not None:
            self._active[record.placement[0]] -= 1
        self._move(record, JobState.CANCELLED)
        self._flush_log(record)
        self._schedule_wms_pass()

    def _admit(self, spec: JobSpec, attempt: int) -> str:
        with self._lock:
            self._job_counter += 1
            job_id = f"{self.job_id_prefix}j-{self._job_counter:06d}"
            record = JobRecord(job_id=job_id, spec=spec, attempt=attempt)
            self._records[job_id] = record
            self._submission_order.append(job_id)
            self._move(record, JobState.SUBMITTED, note=f"spec={spec.job_spec_id} attempt={attempt}")
        self._schedule_wms_pass()
        return job_id

    # ---- event machinery ------------------------------------------------

    def _schedule(self, delay: float, fn: Callable[[], None]) -> None:
        self._event_seq += 1
        heapq.heappush(self._heap, (self.clock + delay, self._event_seq, fn))

    def _schedule_wms_pass(self) -> None:
        if not self._wms_scheduled:
            self._wms_scheduled = True
            self._schedule(0.0, self._wms_pass)

    def step(self) -> bool:
        """Process one event; False when the heap is empty."""
        if not self._heap:
            return False
        time, _, fn = heapq.heappop(self._heap)
        assert time >= self.clock, "virtual time went backwards"
        self.clock = time
        fn()
        return True

    def run_until_idle(self) -> None:
        """Drain every pending event; error out on a stalled (deadlocked)
        engine rather than hanging silently."""
        while self.step():
            pass
        with self._lock:
            stuck = [
                r.job_id
                for r in self._records.values()
                if not r.terminal and r.state in (JobState.SUBMITTED, JobState.MATCHED)
            ]
        if stuck:
            raise EngineStalled(
                f"no pending events but jobs {stuck} are still waiting; "
                "check queue capacities and worker counts"
            )

    def pending_events(self) -> int:
        return len(self._heap)

    # ---- lifecycle steps --------------------------------------------------

    def _wms_pass(self) -> None:
        self._wms_scheduled = False
        for job_id in self._submission_order:
            record = self._records[job_id]
            if record.state is not JobState.SUBMITTED:
                continue
            cluster_id = self._choose_cluster()
            if cluster_id is None:
                continue  # all CE queues full; retried on the next pass
            self._move(record, JobState.MATCHED, note=f"cluster={cluster_id}")
            record.placement = (cluster_id, -1)
            self._active[cluster_id] += 1
            self._ce_queue[cluster_id].append(job_id)
        for cluster_id in self._ce_queue:
            self._allocate_workers(cluster_id)

    def _choose_cluster(self) -> str | None:
        best = None
        for c in self.topology.clusters:
            if len(self._ce_queue[c.cluster_id]) >= c.ce_queue_capacity:
                continue
            load = self._active[c.cluster_id]
            key = (load, c.wn_speed_factor, c.cluster_id)
            if best is None or key < best[0]:
                best = (key, c.cluster_id)
        return None if best is None else best[1]

    def _allocate_workers(self, cluster_id: str) -> None:
        queue = self._ce_queue[cluster_id]
        while queue and self._free_wns[cluster_id]:
            job_id = queue.pop(0)
            wn_index = heapq.heappop(self._free_wns[cluster_id])
            self._start_stage_in(self._records[job_id], cluster_id, wn_index)

    def _start_stage_in(self, record: JobRecord, cluster_id: str, wn_index: int) -> None:
        record.placement = (cluster_id, wn_index)
        self._alloc_start[record.job_id] = self.clock
        self._plans[record.job_id] = self.injector.plan_attempt(record.job_id)
        cluster = self.topology.cluster(cluster_id)
        total = sum(ref.size for ref in record.spec.input_refs)
        bandwidth = min(self.topology.central_se_bandwidth, cluster.local_se_bandwidth)
        duration = total / bandwidth if total else 0.0
        self._move(record, JobState.STAGING_IN, note=f"wn={wn_index} bytes={total}")
        self._schedule(duration, lambda: self._finish_stage_in(record))

    def _finish_stage_in(self, record: JobRecord) -> None:
        plan = self._plans.get(record.job_id, {})
        if Phase.STAGE_IN in plan:
            self._fail(record, plan[Phase.STAGE_IN])
            return
        cluster_id, _ = record.placement
        scratch: dict[str, bytes] = {}
        try:
            for ref in record.spec.input_refs:
                self.central_se.copy_to(self.cluster_se[cluster_id], ref.digest)
                scratch[ref.name] = self.cluster_se[cluster_id].get(ref.digest)
        except (KeyError, IOError) as exc:
            self._fail(record, "stage_in", detail=str(exc))
            return
        self._usage[cluster_id].bytes_staged_in += sum(len(b) for b in scratch.values())
        self._scratch[record.job_id] = scratch
        self._usage[cluster_id].jobs_run += 1
        self._move(record, JobState.RUNNING)
        cluster = self.topology.cluster(cluster_id)
        duration = record.spec.compute_seconds * cluster.wn_speed_factor
        if Phase.RUNNING not in plan:
            self._handles[record.job_id] = self.executor.start(record.spec, scratch)
        self._schedule(duration, lambda: self._finish_run(record))

    def _finish_run(self, record: JobRecord) -> None:
        plan = self._plans.get(record.job_id, {})
        if Phase.RUNNING in plan:
            self._fail(record, plan[Phase.RUNNING])
            return
        handle = self._handles.pop(record.job_id)
        try:
            outputs = self.executor.finish(handle)
        except WorkloadError as exc:
            self._fail(record, "runtime", detail=str(exc))
            return
        missing = set(record.spec.output_names) - set(outputs)
        if missing:
            self._fail(record, "runtime", detail=f"missing outputs {sorted(missing)}")
            return
        self._scratch.pop(record.job_id, None)
        cluster = self.topology.cluster(record.placement[0])
        total = sum(len(b) for b in outputs.values())
        bandwidth = min(self.topology.central_se_bandwidth, cluster.local_se_bandwidth)
        duration = total / bandwidth if total else 0.0
        self._move(record, JobState.STAGING_OUT, note=f"bytes={total}")
        self._schedule(duration, lambda: self._finish_stage_out(record, outputs))

    def _finish_stage_out(self, record: JobRecord, outputs: dict[str, bytes]) -> None:
        plan = self._plans.pop(record.job_id, {})
        if Phase.STAGE_OUT in plan:
            self._fail(record, plan[Phase.STAGE_OUT])
            return
        cluster_id, _ = record.placement
        # publish atomically: every output lands centrally, or none does
        refs = []
        for name in record.spec.output_names:
            data = outputs[name]
            ref = self.cluster_se[cluster_id].put(data)
            self.central_se.put(data)
            refs.append(ArtifactRef(name, ref, len(data)))
        self._usage[cluster_id].bytes_staged_out += sum(len(b) for b in outputs.values())
        record.output_refs = tuple(refs)
        self._move(record, JobState.DONE)
        self._release(record)

    def _fail(self, record: JobRecord, reason: str, detail: str = "") -> None:
        record.failure_reason = reason
        self._plans.pop(record.job_id, None)
        self._scratch.pop(record.job_id, None)
        self._handles.pop(record.job_id, None)
        if record.placement is not None:
            self._usage[record.placement[0]].failures += 1
        note = reason if not detail else f"{reason}: {detail}"
        self._move(record, JobState.FAILED, note=note)
        self._release(record)

    def _release(self, record: JobRecord) -> None:
        cluster_id, wn_index = record.placement
        if wn_index >= 0:
            heapq.heappush(self._free_wns[cluster_id], wn_index)
            self._usage[cluster_id].busy_time += self.clock - self._alloc_start.pop(record.job_id)
        self._active[cluster_id] -= 1
        self._last_terminal_time = self.clock
        self._flush_log(record)
        self._schedule_wms_pass()

    def _move(self, record: JobRecord, new: JobState, note: str = "") -> None:
        with self._lock:
            if record.timestamps and not record.can_transition(new):
                raise ValueError(f"illegal transition {record.state.value} -> {new.value}")
            old = record.state if record.timestamps else None
            self._transition_seq += 1
            record.state = new
            record.timestamps.append((new, self.clock, self._transition_seq))
            self._transitions.append(Transition(self._transition_seq, record.job_id, old, new, self.clock))
            line = f"{self.clock:.6f} {new.value}"
            record.log_lines.append(line if not note else f"{line} {note}")

    def _flush_log(self, record: JobRecord) -> None:
        if self.log_dir is None:
            return
        self.log_dir.mkdir(parents=True, exist_ok=True)
        path = self.log_dir / f"{record.job_id}-a{record.attempt}.log"
        path.write_text("\n".join(record.log_lines) + "\n")

    # ---- queries ----------------------------------------------------------

    def query_status(self, job_id: str) -> JobRecord:
        with self._lock:
            if job_id not in self._records:
                raise KeyError(f"unknown job {job_id!r}")
            return self._records[job_id].snapshot()

    def jobs(self) -> list[JobRecord]:
        with self._lock:
            return [self._records[j].snapshot() for j in self._submission_order]

    def transitions(self, since_seq: int = 0) -> list[Transition]:
        with self._lock:
            return [t for t in self._transitions if t.seq > since_seq]

    def usage_stats(self) -> UsageStats:
        with self._lock:
            elapsed = self._last_terminal_time
            per_cluster = {}
            for c in self.topology.clusters:
                u = self._usage[c.cluster_id]
                per_cluster[c.cluster_id] = ClusterUsage(
                    jobs_run=u.jobs_run,
                    busy_time=u.busy_time,
                    idle_time=c.wn_count * elapsed - u.busy_time,
                    bytes_staged_in=u.bytes_staged_in,
                    bytes_staged_out=u.bytes_staged_out,
                    failures=u.failures,
                )
            return UsageStats(makespan=elapsed, per_cluster=per_cluster)

    def shutdown(self) -> None:
        self.executor.shutdown()
