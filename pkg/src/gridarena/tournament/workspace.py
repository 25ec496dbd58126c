"""Experiment workspace: the exported folder of pre-configuration files.

Layout under the workspace root:

    manifest.xml            the experiment definition
    agents/<id>.xml         one config per agent: character + initial artifact
    status.xml              the full experiment/job map (skeleton at export)
    results/<match>.xml     match results as they are collected
    artifacts/<id>/rNNN.dat agent state after each round
    logs/                   per-attempt job logs
    report.xml, report.txt  written at finalization
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path

from gridarena import xmlio
from gridarena.characters import AgentCharacter
from gridarena.games.base import resolve_workload
from gridarena.statusmap import (
    PENDING,
    ExperimentState,
    ExperimentStatusMap,
    JobSummary,
    load_status,
    save_status,
)
from gridarena.tournament.manifest import (
    ExperimentManifest,
    load_manifest,
    save_manifest,
    schedule_matches,
)


class Workspace:
    def __init__(self, root):
        self.root = Path(root)

    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.xml"

    @property
    def status_path(self) -> Path:
        return self.root / "status.xml"

    @property
    def agents_dir(self) -> Path:
        return self.root / "agents"

    @property
    def results_dir(self) -> Path:
        return self.root / "results"

    @property
    def artifacts_dir(self) -> Path:
        return self.root / "artifacts"

    @property
    def logs_dir(self) -> Path:
        return self.root / "logs"

    @property
    def report_xml_path(self) -> Path:
        return self.root / "report.xml"

    @property
    def report_text_path(self) -> Path:
        return self.root / "report.txt"

    def exists(self) -> bool:
        return self.manifest_path.exists() and self.status_path.exists()

    def load_manifest(self) -> ExperimentManifest:
        return load_manifest(self.manifest_path)

    def load_status(self) -> ExperimentStatusMap:
        return load_status(self.status_path)

    def save_status(self, status: ExperimentStatusMap) -> None:
        save_status(self.status_path, status)

    # ---- agent configs ----------------------------------------------------

    def agent_config_path(self, agent_id: str) -> Path:
        return self.agents_dir / f"{agent_id}.xml"

    def initial_artifact(self, agent_id: str) -> bytes:
        root = xmlio.parse_file(self.agent_config_path(agent_id))
        artifact = root.find("artifact")
        if artifact is None or artifact.text is None:
            raise ValueError(f"agent config for {agent_id!r} carries no artifact")
        return artifact.text.encode("utf-8")

    # ---- per-round artifact versions ---------------------------------------

    def artifact_path(self, agent_id: str, version: int) -> Path:
        return self.artifacts_dir / agent_id / f"r{version:03d}.dat"

    def write_artifact(self, agent_id: str, version: int, data: bytes) -> None:
        path = self.artifact_path(agent_id, version)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(data)
        tmp.replace(path)

    def read_artifact(self, agent_id: str, version: int) -> bytes:
        return self.artifact_path(agent_id, version).read_bytes()

    # ---- results -----------------------------------------------------------

    def result_path(self, match_id: str) -> Path:
        return self.results_dir / f"{match_id}.xml"

    def write_result(self, match_id: str, data: bytes) -> None:
        self.results_dir.mkdir(parents=True, exist_ok=True)
        tmp = self.result_path(match_id).with_suffix(".tmp")
        tmp.write_bytes(data)
        tmp.replace(self.result_path(match_id))

    def collected_match_ids(self) -> set[str]:
        if not self.results_dir.is_dir():
            return set()
        return {p.stem for p in self.results_dir.glob("*.xml")}


def _agent_config_xml(character: AgentCharacter, artifact_text: str) -> ET.Element:
    root = ET.Element(
        "agent",
        {
            "id": character.agent_id,
            "name": character.display_name,
            "seed": str(character.network_seed),
            "alpha": xmlio.fmt_float(character.td_params.alpha),
            "gamma": xmlio.fmt_float(character.td_params.gamma),
            "lambda": xmlio.fmt_float(character.td_params.trace_decay),
            "epsilon": xmlio.fmt_float(character.td_params.epsilon),
        },
    )
    artifact = ET.SubElement(root, "artifact", {"encoding": "text"})
    artifact.text = artifact_text
    return root


def skeleton_status(manifest: ExperimentManifest) -> ExperimentStatusMap:
    status = ExperimentStatusMap(manifest.experiment_id, ExperimentState.CREATED)
    for round_specs in schedule_matches(manifest):
        for ms in round_specs:
            status.upsert(ms.round_index, JobSummary(match_id=ms.match_id, state=PENDING))
    return status


def generate_experiment(manifest: ExperimentManifest, output_path) -> Workspace:
    """Export the pre-configuration folder. A pure function of the manifest:
    re-running over the same inputs rewrites byte-identical files."""
    manifest.validate()
    ws = Workspace(output_path)
    ws.root.mkdir(parents=True, exist_ok=True)
    ws.agents_dir.mkdir(exist_ok=True)

    save_manifest(ws.manifest_path, manifest)
    workload = resolve_workload(manifest.game_id)
    for character in manifest.agents:
        artifact_text = workload.initial_artifact(character).decode("utf-8")
        xmlio.write_atomic(ws.agent_config_path(character.agent_id), _agent_config_xml(character, artifact_text))
    ws.save_status(skeleton_status(manifest))
    return ws
