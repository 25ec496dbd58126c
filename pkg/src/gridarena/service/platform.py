"""Multi-experiment host behind the HTTP service.

Each experiment gets its own workspace directory, orchestrator and runner
thread; every orchestrator event is folded into one global, totally
ordered stream so clients can resume from a sequence number.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path

from gridarena.grid.failures import FailurePolicy
from gridarena.grid.jobs import JobRecord
from gridarena.grid.topology import GridTopology
from gridarena.orchestrator import (
    ExperimentReport,
    Orchestrator,
    OrchestratorError,
    OrchestratorEvent,
    ResubmitPolicy,
)
from gridarena.statusmap import ExperimentState, ExperimentStatusMap
from gridarena.tournament import ExperimentManifest, generate_experiment
from gridarena.tournament.segment import DEFAULT_GAME_SECONDS


@dataclass(frozen=True)
class PlatformEvent:
    seq: int  # global, totally ordered
    experiment_id: str
    job_id: str
    old_state: str
    new_state: str
    time: float

    def line(self) -> str:
        from gridarena import xmlio

        return (
            f"{self.seq} {self.experiment_id} {self.job_id} "
            f"{self.old_state} {self.new_state} {xmlio.fmt_float(self.time)}"
        )


class _Handle:
    def __init__(self, orchestrator: Orchestrator):
        self.orchestrator = orchestrator
        self.thread: threading.Thread | None = None
        self.error: str | None = None


class Platform:
    def __init__(
        self,
        data_root: str | Path,
        topology: GridTopology,
        backend: str = "local",
        policy: ResubmitPolicy | None = None,
        failure_policy: FailurePolicy | None = None,
        game_seconds: float = DEFAULT_GAME_SECONDS,
    ):
        self.data_root = Path(data_root)
        self.data_root.mkdir(parents=True, exist_ok=True)
        self.topology = topology
        self.backend = backend
        self.policy = policy
        self.failure_policy = failure_policy
        self.game_seconds = game_seconds
        self._handles: dict[str, _Handle] = {}
        self._events: list[PlatformEvent] = []
        self._lock = threading.RLock()

    # ---- events -----------------------------------------------------------

    def _sink(self, event: OrchestratorEvent) -> None:
        with self._lock:
            self._events.append(
                PlatformEvent(
                    seq=len(self._events) + 1,
                    experiment_id=event.experiment_id,
                    job_id=event.job_id,
                    old_state=event.old_state,
                    new_state=event.new_state,
                    time=event.time,
                )
            )

    def events(self, since: int = 0) -> list[PlatformEvent]:
        with self._lock:
            return self._events[since:]

    def busy(self) -> bool:
        with self._lock:
            return any(
                h.orchestrator.state is ExperimentState.RUNNING for h in self._handles.values()
            )

    # ---- experiment lifecycle ----------------------------------------------

    def create(self, manifest: ExperimentManifest) -> str:
        manifest.validate()
        with self._lock:
            if manifest.experiment_id in self._handles:
                raise OrchestratorError(f"experiment {manifest.experiment_id!r} already exists")
            ws = generate_experiment(manifest, self.data_root / manifest.experiment_id)
            orch = Orchestrator(
                ws,
                self.topology,
                backend=self.backend,
                policy=self.policy,
                failure_policy=self.failure_policy,
                game_seconds=self.game_seconds,
                event_sink=self._sink,
                job_id_prefix=f"{manifest.experiment_id}-",
            )
            self._handles[manifest.experiment_id] = _Handle(orch)
            return manifest.experiment_id

    def _handle(self, experiment_id: str) -> _Handle:
        with self._lock:
            if experiment_id not in self._handles:
                raise KeyError(f"no experiment {experiment_id!r}")
            return self._handles[experiment_id]

    def experiment_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._handles)

    def status(self, experiment_id: str) -> ExperimentStatusMap:
        return self._handle(experiment_id).orchestrator.snapshot()

    def start(self, experiment_id: str) -> ExperimentState:
        handle = self._handle(experiment_id)
        orch = handle.orchestrator
        with self._lock:
            if orch.state is ExperimentState.CREATED:
                orch.launch()
            elif orch.state is ExperimentState.PAUSED:
                orch.resume()
            else:
                raise OrchestratorError(f"cannot start a {orch.state.value} experiment")
            if handle.thread is None or not handle.thread.is_alive():
                handle.thread = threading.Thread(
                    target=self._run, args=(handle,), name=f"runner-{experiment_id}", daemon=True
                )
                handle.thread.start()
            return orch.state

    def _run(self, handle: _Handle) -> None:
        try:
            handle.orchestrator.run_to_completion(events_per_poll=50)
        except OrchestratorError as exc:
            handle.error = str(exc)

    def pause(self, experiment_id: str) -> ExperimentState:
        orch = self._handle(experiment_id).orchestrator
        orch.pause()
        return orch.state

    def wait(self, experiment_id: str, timeout: float = 60.0) -> None:
        handle = self._handle(experiment_id)
        if handle.thread is not None:
            handle.thread.join(timeout)

    def jobs(self, experiment_id: str, state: str | None = None) -> list[JobRecord]:
        orch = self._handle(experiment_id).orchestrator
        records = orch.engine.jobs()
        if state is not None:
            records = [r for r in records if r.state.value == state]
        return records

    def find_job(self, job_id: str) -> tuple[str, JobRecord]:
        with self._lock:
            for experiment_id, handle in self._handles.items():
                try:
                    return experiment_id, handle.orchestrator.engine.query_status(job_id)
                except KeyError:
                    continue
        raise KeyError(f"unknown job {job_id!r}")

    def resubmit_job(self, job_id: str) -> str:
        experiment_id, _ = self.find_job(job_id)
        orch = self._handle(experiment_id).orchestrator
        new_id = orch.resubmit_job(job_id)
        self.start_if_needed(experiment_id)
        return new_id

    def start_if_needed(self, experiment_id: str) -> None:
        """Restart the runner so a manual resubmission actually executes."""
        handle = self._handle(experiment_id)
        orch = handle.orchestrator
        with self._lock:
            if orch.state is ExperimentState.RUNNING and (
                handle.thread is None or not handle.thread.is_alive()
            ):
                handle.thread = threading.Thread(
                    target=self._run, args=(handle,), name=f"runner-{experiment_id}", daemon=True
                )
                handle.thread.start()

    def usage(self) -> dict[str, object]:
        with self._lock:
            return {
                experiment_id: handle.orchestrator.engine.usage_stats()
                for experiment_id, handle in self._handles.items()
            }

    def report(self, experiment_id: str) -> ExperimentReport:
        return self._handle(experiment_id).orchestrator.finalize()
