"""Drives one experiment end to end, round by round.

The orchestrator owns the status map. Grid transitions arrive by draining
the engine's transition log inside poll(): results of finished jobs are
collected exactly once, failed attempts are automatically resubmitted with
backoff up to the policy limit, and when a round fully settles the next
round's jobs are staged and submitted using the artifacts the previous
round staged back. Everything durable (status.xml, results, artifact
versions) lives in the workspace, so a crashed orchestrator can be rebuilt
from disk and driven to the same standings.
"""

from __future__ import annotations

import threading
from collections import Counter
from dataclasses import dataclass, replace

from gridarena.games.base import MatchResult
from gridarena.grid.engine import GridEngine, LocalThreadPoolExecutor, SynchronousExecutor
from gridarena.grid.failures import FailurePolicy
from gridarena.grid.jobs import JobRecord, JobState
from gridarena.grid.topology import GridTopology
from gridarena.orchestrator.report import (
    ExperimentReport,
    report_text,
    report_to_xml,
    speedup_ratio,
)
from gridarena.results import result_from_bytes
from gridarena.statusmap import (
    PENDING,
    ExperimentState,
    ExperimentStatusMap,
    JobSummary,
)
from gridarena.tournament.manifest import experiment_totals, schedule_matches
from gridarena.tournament.segment import (
    DEFAULT_GAME_SECONDS,
    artifact_name,
    segment_experiment,
)
from gridarena.tournament.standings import compute_standings
from gridarena.tournament.workspace import Workspace
from gridarena import xmlio


class OrchestratorError(RuntimeError):
    pass


@dataclass(frozen=True)
class ResubmitPolicy:
    max_attempts: int = 3
    backoff_seconds: float = 5.0

    def __post_init__(self) -> None:
        if self.max_attempts < 1:
            raise ValueError(f"max_attempts must be >= 1, got {self.max_attempts}")
        if self.backoff_seconds < 0:
            raise ValueError("backoff_seconds must be >= 0")


@dataclass(frozen=True)
class OrchestratorEvent:
    seq: int
    experiment_id: str
    job_id: str  # "-" for experiment-level transitions
    old_state: str
    new_state: str
    time: float

    def line(self) -> str:
        return (
            f"{self.seq} {self.experiment_id} {self.job_id} "
            f"{self.old_state} {self.new_state} {xmlio.fmt_float(self.time)}"
        )


class Orchestrator:
    def __init__(
        self,
        workspace: Workspace | str,
        topology: GridTopology,
        backend: str = "sim",
        policy: ResubmitPolicy | None = None,
        failure_policy: FailurePolicy | None = None,
        game_seconds: float = DEFAULT_GAME_SECONDS,
        event_sink=None,
        job_id_prefix: str = "",
    ):
        self.ws = workspace if isinstance(workspace, Workspace) else Workspace(workspace)
        if not self.ws.exists():
            raise OrchestratorError(f"no experiment workspace at {self.ws.root}")
        self.manifest = self.ws.load_manifest()
        self.policy = policy or ResubmitPolicy(max_attempts=self.manifest.max_attempts)
        if backend == "sim":
            executor = SynchronousExecutor()
        elif backend == "local":
            executor = LocalThreadPoolExecutor(max_workers=topology.total_worker_nodes)
        else:
            raise ValueError(f"unknown backend {backend!r}, expected 'sim' or 'local'")
        self.backend = backend
        self._event_sink = event_sink
        self.engine = GridEngine(
            topology,
            executor=executor,
            failure_policy=failure_policy,
            log_dir=self.ws.logs_dir,
            job_id_prefix=job_id_prefix,
        )
        self.rounds = schedule_matches(self.manifest)
        self._spec_by_match = {
            s.match_id: s for s in segment_experiment(self.manifest, game_seconds)
        }
        self.status: ExperimentStatusMap = self.ws.load_status()

        self._artifacts: dict[str, tuple[str, int]] = {}  # name -> (digest, size)
        self._results: dict[str, MatchResult] = {}
        self._forfeited: set[str] = set()
        self._match_attempts: dict[str, int] = {}
        self._live: set[str] = set()  # matches with an attempt in flight
        self._round_cursor = 0
        self._events: list[OrchestratorEvent] = []
        self._engine_seq = 0
        self._resubmissions = 0
        self._failure_counts: Counter[str] = Counter()
        self._lock = threading.RLock()

        if self.status.state is not ExperimentState.CREATED:
            self._recover()

    # ---- public lifecycle ------------------------------------------------

    @property
    def experiment_id(self) -> str:
        return self.manifest.experiment_id

    @property
    def state(self) -> ExperimentState:
        return self.status.state

    def launch(self) -> str:
        """Stage initial artifacts, submit the first round, persist."""
        with self._lock:
            if self.status.state is not ExperimentState.CREATED:
                raise OrchestratorError(
                    f"experiment {self.experiment_id} is {self.status.state.value}; "
                    "launch is only valid once, on a freshly exported workspace"
                )
            for agent in self.manifest.agents:
                data = self.ws.initial_artifact(agent.agent_id)
                self._register_artifact(agent.agent_id, 0, data)
            self._set_state(ExperimentState.RUNNING)
        self.poll()
        return self.experiment_id

    def pause(self) -> None:
        with self._lock:
            if self.status.state is not ExperimentState.RUNNING:
                raise OrchestratorError(f"cannot pause a {self.status.state.value} experiment")
            self._set_state(ExperimentState.PAUSED)
            self._persist()

    def resume(self) -> None:
        with self._lock:
            if self.status.state is not ExperimentState.PAUSED:
                raise OrchestratorError(f"cannot resume a {self.status.state.value} experiment")
            self._set_state(ExperimentState.RUNNING)
            self._persist()

    def poll(self) -> ExperimentStatusMap:
        """Drain grid transitions, react, persist, return a snapshot."""
        with self._lock:
            transitions = self.engine.transitions(self._engine_seq)
            if transitions:
                self._engine_seq = transitions[-1].seq
            for t in transitions:
                record = self.engine.query_status(t.job_id)
                self._apply_summary(record)
                self._emit(t.job_id, t.old_state.value if t.old_state else PENDING,
                           t.new_state.value, t.time)
                if t.new_state is JobState.DONE:
                    self._collect(record)
                elif t.new_state is JobState.FAILED:
                    self._auto_resubmit(record)
            if self.status.state is ExperimentState.RUNNING:
                self._advance_rounds()
                self._submit_pending(self._round_cursor)
            self._persist()
            return self._snapshot()

    def snapshot(self) -> ExperimentStatusMap:
        """Read-only consistent view (no reactions, no persistence)."""
        with self._lock:
            return self._snapshot()

    def run_to_completion(self, events_per_poll: int = 500) -> ExperimentStatusMap:
        while True:
            snapshot = self.poll()
            if snapshot.state is not ExperimentState.RUNNING:
                return snapshot
            progressed = False
            for _ in range(events_per_poll):
                if not self.engine.step():
                    break
                progressed = True
            if not progressed and not self.engine.pending_events():
                snapshot = self.poll()
                if snapshot.state is ExperimentState.RUNNING and not self.engine.pending_events():
                    raise OrchestratorError(
                        f"experiment {self.experiment_id} stalled with no pending grid events"
                    )
                if snapshot.state is not ExperimentState.RUNNING:
                    return snapshot

    def resubmit_failed(self) -> list[str]:
        """Resubmit every match whose latest attempt failed below the
        attempt limit (the recovery entry point; polling does the same
        automatically for live failures). Returns the resubmitted ids."""
        with self._lock:
            resubmitted = []
            for round_index, summary in self.status.all_jobs():
                match_id = summary.match_id
                if (
                    summary.state != JobState.FAILED.value
                    or match_id in self._results
                    or match_id in self._forfeited
                    or match_id in self._live
                ):
                    continue
                latest = self._match_attempts.get(match_id, summary.attempt)
                if summary.attempt < latest:
                    continue  # an older attempt's row; a newer one exists
                if latest >= self.policy.max_attempts:
                    self._forfeit(match_id)
                    continue
                self._submit_match(match_id, latest + 1, delay=0.0)
                resubmitted.append(match_id)
            self._persist()
            return resubmitted

    def resubmit_job(self, job_id: str) -> str:
        """Manual resubmission of one failed attempt (service/CLI surface)."""
        with self._lock:
            record = self.engine.query_status(job_id)
            match_id = record.spec.match_id
            if record.state is not JobState.FAILED:
                raise OrchestratorError(f"{job_id} is {record.state.value}, not FAILED")
            if match_id in self._results or match_id in self._live:
                raise OrchestratorError(f"match {match_id} already has a result or live attempt")
            if record.attempt >= self.policy.max_attempts:
                raise OrchestratorError(f"{job_id} exhausted {self.policy.max_attempts} attempts")
            self._forfeited.discard(match_id)
            new_id = self._submit_match(match_id, record.attempt + 1, delay=0.0)
            if self.status.state is ExperimentState.FAILED:
                # a manual retry reopens a degraded experiment
                self._set_state(ExperimentState.RUNNING)
                self._persist()
            return new_id

    def events(self, since: int = 0) -> list[OrchestratorEvent]:
        with self._lock:
            return [e for e in self._events if e.seq > since]

    def finalize(self, per_match_minutes: float | None = None) -> ExperimentReport:
        with self._lock:
            if self.status.state not in (ExperimentState.COMPLETED, ExperimentState.FAILED):
                raise OrchestratorError(
                    f"cannot finalize while {self.status.state.value}; "
                    "the experiment must reach COMPLETED or FAILED"
                )
            totals = experiment_totals(self.manifest)
            ordered = [
                self._results[ms.match_id]
                for rnd in self.rounds
                for ms in rnd
                if ms.match_id in self._results
            ]
            standings = compute_standings(ordered, self.manifest, sorted(self._forfeited))
            usage = self.engine.usage_stats()
            if per_match_minutes is None:
                sequential = sum(s.compute_seconds for s in self._spec_by_match.values())
            else:
                sequential = totals.total_matches * per_match_minutes * 60.0
            report = ExperimentReport(
                experiment_id=self.experiment_id,
                state=self.status.state.value,
                totals=totals,
                standings=standings,
                makespan_seconds=usage.makespan,
                estimated_sequential_seconds=sequential,
                speedup=speedup_ratio(sequential, usage.makespan),
                usage=usage,
                failure_counts=dict(self._failure_counts),
                resubmissions=self._resubmissions,
                permanently_failed=tuple(sorted(self._forfeited)),
            )
            xmlio.write_atomic(self.ws.report_xml_path, report_to_xml(report))
            tmp = self.ws.report_text_path.with_suffix(".tmp")
            tmp.write_text(report_text(report))
            tmp.replace(self.ws.report_text_path)
            return report

    def shutdown(self) -> None:
        self.engine.shutdown()

    # ---- internals ---------------------------------------------------------

    def _register_artifact(self, agent_id: str, version: int, data: bytes) -> None:
        name = artifact_name(agent_id, version)
        digest = self.engine.central_se.put(data)
        self._artifacts[name] = (digest, len(data))
        self.ws.write_artifact(agent_id, version, data)

    def _resolved_spec(self, match_id: str):
        spec = self._spec_by_match[match_id]
        refs = []
        for ref in spec.input_refs:
            if ref.name not in self._artifacts:
                raise OrchestratorError(
                    f"artifact {ref.name!r} needed by {match_id} is not staged; "
                    "round ordering was violated"
                )
            digest, size = self._artifacts[ref.name]
            refs.append(replace(ref, digest=digest, size=size))
        return replace(spec, input_refs=tuple(refs))

    def _submit_match(self, match_id: str, attempt: int, delay: float) -> str | None:
        spec = self._resolved_spec(match_id)
        self._match_attempts[match_id] = attempt
        self._live.add(match_id)
        if attempt > 1:
            self._resubmissions += 1
        if delay > 0:
            self.engine.submit_at(delay, spec, attempt=attempt)
            return None
        return self.engine.submit(spec, attempt=attempt)

    def _submit_pending(self, round_index: int) -> None:
        if round_index >= len(self.rounds):
            return
        for ms in self.rounds[round_index]:
            if (
                ms.match_id in self._results
                or ms.match_id in self._forfeited
                or ms.match_id in self._live
                or self._match_attempts.get(ms.match_id, 0) > 0
            ):
                continue
            self._submit_match(ms.match_id, attempt=1, delay=0.0)

    def _collect(self, record: JobRecord) -> None:
        match_id = record.spec.match_id
        self._live.discard(match_id)
        if match_id in self._results:
            return  # duplicate delivery is ignored
        call = record.spec.workload
        outputs = {ref.name: self.engine.central_se.get(ref.digest) for ref in record.output_refs}
        result = result_from_bytes(outputs[call.output_result])
        if result.match_id != match_id:
            raise OrchestratorError(
                f"job {record.job_id} delivered result for {result.match_id}, expected {match_id}"
            )
        self._results[match_id] = result
        self.ws.write_result(match_id, outputs[call.output_result])
        version = record.spec.round_index + 1
        self._register_artifact(call.character_a.agent_id, version, outputs[call.output_a])
        self._register_artifact(call.character_b.agent_id, version, outputs[call.output_b])

    def _auto_resubmit(self, record: JobRecord) -> None:
        match_id = record.spec.match_id
        self._live.discard(match_id)
        self._failure_counts[record.failure_reason or "unknown"] += 1
        if match_id in self._results:
            return
        if record.attempt < self.policy.max_attempts:
            self._submit_match(match_id, record.attempt + 1, delay=self.policy.backoff_seconds)
        else:
            self._forfeit(match_id)

    def _forfeit(self, match_id: str) -> None:
        self._forfeited.add(match_id)

    def _round_complete(self, round_index: int) -> bool:
        return all(
            ms.match_id in self._results or ms.match_id in self._forfeited
            for ms in self.rounds[round_index]
        )

    def _finish_round(self, round_index: int) -> None:
        """Copy artifacts forward for agents that did not produce a new
        version this round (byes and forfeited matches)."""
        version = round_index + 1
        for agent in self.manifest.agents:
            name = artifact_name(agent.agent_id, version)
            if name in self._artifacts:
                continue
            prev = artifact_name(agent.agent_id, round_index)
            digest, size = self._artifacts[prev]
            data = self.engine.central_se.get(digest)
            self._register_artifact(agent.agent_id, version, data)

    def _advance_rounds(self) -> None:
        while self._round_cursor < len(self.rounds) and self._round_complete(self._round_cursor):
            self._finish_round(self._round_cursor)
            self._round_cursor += 1
        if self._round_cursor >= len(self.rounds):
            final = ExperimentState.FAILED if self._forfeited else ExperimentState.COMPLETED
            if self.status.state is not final:
                self._set_state(final)

    def _apply_summary(self, record: JobRecord) -> None:
        submitted_at = record.timestamps[0][1]
        finished_at = record.timestamps[-1][1] if record.terminal else None
        summary = JobSummary(
            match_id=record.spec.match_id,
            state=record.state.value,
            job_id=record.job_id,
            attempt=record.attempt,
            cluster=record.placement[0] if record.placement else "",
            submitted_at=submitted_at,
            finished_at=finished_at,
        )
        self.status.upsert(record.spec.round_index, summary)

    def _set_state(self, new: ExperimentState) -> None:
        old = self.status.state
        self.status.state = new
        self._emit("-", old.value, new.value, self.engine.clock)

    def _emit(self, job_id: str, old: str, new: str, time: float) -> None:
        event = OrchestratorEvent(
            seq=len(self._events) + 1,
            experiment_id=self.experiment_id,
            job_id=job_id,
            old_state=old,
            new_state=new,
            time=time,
        )
        self._events.append(event)
        if self._event_sink is not None:
            self._event_sink(event)

    def _persist(self) -> None:
        try:
            self.ws.save_status(self.status)
        except OSError as exc:
            self.status.state = ExperimentState.PAUSED
            raise OrchestratorError(f"could not persist status map: {exc}") from exc

    def _snapshot(self) -> ExperimentStatusMap:
        return ExperimentStatusMap(
            experiment_id=self.status.experiment_id,
            state=self.status.state,
            rounds={r: list(entries) for r, entries in self.status.rounds.items()},
        )

    # ---- crash recovery ------------------------------------------------------

    def _recover(self) -> None:
        """Rebuild volatile state from the workspace after a restart.

        Jobs recorded in non-terminal states belonged to the dead engine;
        they are marked FAILED (reason: lost) so resubmit_failed() can drive
        the experiment onward. Deterministic workloads make the eventual
        standings identical to an uninterrupted run.
        """
        from gridarena.results import result_from_bytes as _parse

        for agent in self.manifest.agents:
            agent_dir = self.ws.artifacts_dir / agent.agent_id
            if not agent_dir.is_dir():
                continue
            for path in sorted(agent_dir.glob("r*.dat")):
                version = int(path.stem[1:])
                self._register_artifact(agent.agent_id, version, path.read_bytes())
        for match_id in sorted(self.ws.collected_match_ids()):
            self._results[match_id] = _parse(self.ws.result_path(match_id).read_bytes())

        non_terminal = {
            JobState.SUBMITTED.value,
            JobState.MATCHED.value,
            JobState.STAGING_IN.value,
            JobState.RUNNING.value,
            JobState.STAGING_OUT.value,
        }
        for round_index, entries in self.status.rounds.items():
            for i, summary in enumerate(entries):
                if summary.state == PENDING:
                    continue
                self._match_attempts[summary.match_id] = max(
                    self._match_attempts.get(summary.match_id, 0), summary.attempt
                )
                if summary.state in non_terminal:
                    entries[i] = replace(summary, state=JobState.FAILED.value)
                    self._emit(summary.job_id, summary.state, JobState.FAILED.value, 0.0)
        for match_id, attempts in self._match_attempts.items():
            if (
                match_id not in self._results
                and attempts >= self.policy.max_attempts
                and self._latest_state(match_id) == JobState.FAILED.value
            ):
                self._forfeit(match_id)

        while self._round_cursor < len(self.rounds) and self._round_complete(self._round_cursor):
            self._finish_round(self._round_cursor)
            self._round_cursor += 1
        if self.status.state in (ExperimentState.COMPLETED, ExperimentState.FAILED):
            return
        self._persist()

    def _latest_state(self, match_id: str) -> str:
        best = None
        for _, summary in self.status.all_jobs():
            if summary.match_id != match_id:
                continue
            if best is None or summary.attempt >= best.attempt:
                best = summary
        return best.state if best else PENDING
