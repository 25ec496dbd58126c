"""The persisted full map of an experiment: every match, every attempt.

This one XML document drives the dashboard, the service API and crash
recovery; it must round-trip losslessly and serialize byte-stably.
"""

from __future__ import annotations

import enum
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from gridarena import xmlio

# lifecycle of the experiment itself (job states live in grid.jobs)
class ExperimentState(str, enum.Enum):
    CREATED = "CREATED"
    RUNNING = "RUNNING"
    PAUSED = "PAUSED"
    COMPLETED = "COMPLETED"
    FAILED = "FAILED"


# placeholder state for matches whose first attempt has not been submitted
PENDING = "PENDING"


@dataclass(frozen=True)
class JobSummary:
    match_id: str
    state: str  # a JobState value, or PENDING
    job_id: str = ""
    attempt: int = 0
    cluster: str = ""
    submitted_at: float | None = None
    finished_at: float | None = None


@dataclass
class ExperimentStatusMap:
    experiment_id: str
    state: ExperimentState = ExperimentState.CREATED
    # round index -> summaries; one PENDING row per unsubmitted match plus
    # one row per attempt once submitted
    rounds: dict[int, list[JobSummary]] = field(default_factory=dict)

    def all_jobs(self) -> list[tuple[int, JobSummary]]:
        return [(r, s) for r in sorted(self.rounds) for s in self.rounds[r]]

    def upsert(self, round_index: int, summary: JobSummary) -> None:
        """Replace the entry for this attempt (or the PENDING placeholder
        of the same match); append if it is a new attempt."""
        entries = self.rounds.setdefault(round_index, [])
        for i, existing in enumerate(entries):
            if existing.match_id != summary.match_id:
                continue
            if existing.state == PENDING or existing.job_id == summary.job_id:
                entries[i] = summary
                return
        entries.append(summary)


def _fmt_time(t: float | None) -> str:
    return "" if t is None else xmlio.fmt_float(t)


def _parse_time(s: str) -> float | None:
    return None if s == "" else float(s)


def status_to_xml(status: ExperimentStatusMap) -> ET.Element:
    root = ET.Element("experiment", {"id": status.experiment_id, "state": status.state.value})
    rounds = ET.SubElement(root, "rounds")
    for round_index in sorted(status.rounds):
        round_el = ET.SubElement(rounds, "round", {"index": str(round_index)})
        for s in status.rounds[round_index]:
            ET.SubElement(
                round_el,
                "job",
                {
                    "job_id": s.job_id,
                    "match_id": s.match_id,
                    "state": s.state,
                    "attempt": str(s.attempt),
                    "cluster": s.cluster,
                    "submitted_at": _fmt_time(s.submitted_at),
                    "finished_at": _fmt_time(s.finished_at),
                },
            )
    return root


def status_from_xml(root: ET.Element) -> ExperimentStatusMap:
    if root.tag != "experiment":
        raise ValueError(f"expected <experiment>, got <{root.tag}>")
    status = ExperimentStatusMap(
        experiment_id=root.attrib["id"], state=ExperimentState(root.attrib["state"])
    )
    rounds_el = root.find("rounds")
    for round_el in (rounds_el if rounds_el is not None else ()):
        index = int(round_el.attrib["index"])
        status.rounds[index] = [
            JobSummary(
                match_id=el.attrib["match_id"],
                state=el.attrib["state"],
                job_id=el.attrib["job_id"],
                attempt=int(el.attrib["attempt"]),
                cluster=el.attrib["cluster"],
                submitted_at=_parse_time(el.attrib["submitted_at"]),
                finished_at=_parse_time(el.attrib["finished_at"]),
            )
            for el in round_el
        ]
    return status


def load_status(path) -> ExperimentStatusMap:
    return status_from_xml(xmlio.parse_file(path))


def save_status(path, status: ExperimentStatusMap) -> None:
    xmlio.write_atomic(path, status_to_xml(status))
