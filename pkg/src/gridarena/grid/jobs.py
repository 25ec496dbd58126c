"""Job descriptions and the per-attempt lifecycle record."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from gridarena.characters import AgentCharacter


class JobState(str, enum.Enum):
    SUBMITTED = "SUBMITTED"
    MATCHED = "MATCHED"
    STAGING_IN = "STAGING_IN"
    RUNNING = "RUNNING"
    STAGING_OUT = "STAGING_OUT"
    DONE = "DONE"
    FAILED = "FAILED"
    CANCELLED = "CANCELLED"


TERMINAL_STATES = frozenset({JobState.DONE, JobState.FAILED, JobState.CANCELLED})

LEGAL_TRANSITIONS: frozenset[tuple[JobState, JobState]] = frozenset(
    {
        (JobState.SUBMITTED, JobState.MATCHED),
        (JobState.MATCHED, JobState.STAGING_IN),
        (JobState.STAGING_IN, JobState.RUNNING),
        (JobState.RUNNING, JobState.STAGING_OUT),
        (JobState.STAGING_OUT, JobState.DONE),
        (JobState.SUBMITTED, JobState.FAILED),
        (JobState.MATCHED, JobState.FAILED),
        (JobState.STAGING_IN, JobState.FAILED),
        (JobState.RUNNING, JobState.FAILED),
        (JobState.STAGING_OUT, JobState.FAILED),
        (JobState.SUBMITTED, JobState.CANCELLED),
        (JobState.MATCHED, JobState.CANCELLED),
    }
)


@dataclass(frozen=True)
class ArtifactRef:
    """A named artifact; digest and size are filled in once the bytes exist."""

    name: str
    digest: str | None = None
    size: int | None = None

    @property
    def resolved(self) -> bool:
        return self.digest is not None and self.size is not None


@dataclass(frozen=True)
class WorkloadCall:
    """Everything a worker needs to actually play one match."""

    game_id: str
    match_id: str
    character_a: AgentCharacter
    character_b: AgentCharacter
    games: int
    seed: int
    input_a: str  # artifact name carrying agent A's current state
    input_b: str
    output_result: str
    output_a: str
    output_b: str


@dataclass(frozen=True)
class JobSpec:
    """One autonomous grid job: inputs, declared outputs, compute cost.

    ``workload`` is the live handle for jobs that really play a match;
    synthetic simulation jobs leave it None and emit placeholder outputs.
    ``match_id``/``round_index`` tie the job back to the tournament plan.
    """

    job_spec_id: str
    input_refs: tuple[ArtifactRef, ...]
    output_names: tuple[str, ...]
    compute_seconds: float
    workload: WorkloadCall | None = None
    match_id: str = ""
    round_index: int = 0

    def validate(self) -> None:
        if not self.job_spec_id:
            raise ValueError("job_spec_id must be non-empty")
        if self.compute_seconds < 0:
            raise ValueError(f"compute_seconds must be >= 0, got {self.compute_seconds}")
        names = [r.name for r in self.input_refs]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate input names in {self.job_spec_id}: {names}")
        if len(set(self.output_names)) != len(self.output_names):
            raise ValueError(f"duplicate output names in {self.job_spec_id}")
        for ref in self.input_refs:
            if not ref.resolved:
                raise ValueError(f"unresolved input {ref.name!r} in {self.job_spec_id}")
            if ref.size <= 0:
                raise ValueError(f"input {ref.name!r} declares size {ref.size}, must be > 0")
        if self.workload is not None:
            call = self.workload
            missing = {call.input_a, call.input_b} - set(names)
            if missing:
                raise ValueError(f"workload inputs {missing} not among input refs")
            declared = {call.output_result, call.output_a, call.output_b}
            if declared != set(self.output_names):
                raise ValueError(
                    f"workload outputs {declared} disagree with declared {self.output_names}"
                )


@dataclass
class JobRecord:
    """Lifecycle of one attempt. A resubmission is a brand-new record (and
    job id) with ``attempt`` bumped; terminal states are absorbing."""

    job_id: str
    spec: JobSpec
    state: JobState = JobState.SUBMITTED
    attempt: int = 1
    placement: tuple[str, int] | None = None  # (cluster_id, wn_index)
    # (state, virtual time, global transition seq) per transition
    timestamps: list[tuple[JobState, float, int]] = field(default_factory=list)
    failure_reason: str | None = None
    output_refs: tuple[ArtifactRef, ...] = ()
    log_lines: list[str] = field(default_factory=list)

    @property
    def terminal(self) -> bool:
        return self.state in TERMINAL_STATES

    def can_transition(self, new: JobState) -> bool:
        return (self.state, new) in LEGAL_TRANSITIONS

    def snapshot(self) -> "JobRecord":
        return JobRecord(
            job_id=self.job_id,
            spec=self.spec,
            state=self.state,
            attempt=self.attempt,
            placement=self.placement,
            timestamps=list(self.timestamps),
            failure_reason=self.failure_reason,
            output_refs=self.output_refs,
            log_lines=list(self.log_lines),
        )

    def state_time(self, state: JobState) -> float:
        for st, t, _ in self.timestamps:
            if st == state:
                return t
        raise KeyError(f"{self.job_id} never entered {state}")
