"""Experiment manifests: the unit a user creates, validates and submits."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace

from gridarena import xmlio
from gridarena.characters import AgentCharacter, TdParams
from gridarena.seeding import derive_seed
from gridarena.tournament.schedule import round_robin_schedule


@dataclass(frozen=True)
class ExperimentManifest:
    experiment_id: str
    game_id: str
    agents: tuple[AgentCharacter, ...]
    games_per_match: int
    max_attempts: int = 3
    seed: int = 0
    created_at: str = "1970-01-01T00:00:00+00:00"

    def validation_errors(self) -> list[str]:
        errors = []
        if not self.experiment_id:
            errors.append("experiment_id must be non-empty")
        if not self.game_id:
            errors.append("game_id must be non-empty")
        if len(self.agents) < 2:
            errors.append(f"need at least 2 agents, got {len(self.agents)}")
        ids = [a.agent_id for a in self.agents]
        if len(set(ids)) != len(ids):
            errors.append(f"duplicate agent ids: {sorted({x for x in ids if ids.count(x) > 1})}")
        if self.games_per_match < 1:
            errors.append(f"games_per_match must be >= 1, got {self.games_per_match}")
        if self.max_attempts < 1:
            errors.append(f"max_attempts must be >= 1, got {self.max_attempts}")
        return errors

    def validate(self) -> None:
        errors = self.validation_errors()
        if errors:
            raise ValueError("invalid manifest: " + "; ".join(errors))

    def agent(self, agent_id: str) -> AgentCharacter:
        for a in self.agents:
            if a.agent_id == agent_id:
                return a
        raise KeyError(f"no agent {agent_id!r}")

    def with_agent(self, character: AgentCharacter) -> "ExperimentManifest":
        return replace(self, agents=self.agents + (character,))


@dataclass(frozen=True)
class MatchSpec:
    match_id: str
    agent_a: str
    agent_b: str
    games: int
    round_index: int
    seed: int


@dataclass(frozen=True)
class ExperimentTotals:
    """Tournament arithmetic. ``participation_games`` counts every game
    once per participant (twice per actual game), which is how per-agent
    workloads add up; ``unique_games`` counts each game once. The two
    differ by exactly a factor of two."""

    agents: int
    total_matches: int
    unique_games: int
    per_agent_games: int
    participation_games: int


def experiment_totals(manifest: ExperimentManifest) -> ExperimentTotals:
    n = len(manifest.agents)
    g = manifest.games_per_match
    total_matches = n * (n - 1) // 2
    return ExperimentTotals(
        agents=n,
        total_matches=total_matches,
        unique_games=total_matches * g,
        per_agent_games=(n - 1) * g,
        participation_games=n * (n - 1) * g,
    )


def schedule_matches(manifest: ExperimentManifest) -> list[list[MatchSpec]]:
    """The manifest's full round-robin plan with deterministic match ids
    and per-match seeds."""
    manifest.validate()
    index = {a.agent_id: i for i, a in enumerate(manifest.agents)}
    rounds = []
    for round_index, pairs in enumerate(round_robin_schedule([a.agent_id for a in manifest.agents])):
        specs = []
        for agent_a, agent_b in pairs:
            i, j = sorted((index[agent_a], index[agent_b]))
            match_id = f"{manifest.experiment_id}-r{round_index:03d}-p{i:03d}x{j:03d}"
            specs.append(
                MatchSpec(
                    match_id=match_id,
                    agent_a=agent_a,
                    agent_b=agent_b,
                    games=manifest.games_per_match,
                    round_index=round_index,
                    seed=derive_seed(manifest.seed, match_id),
                )
            )
        rounds.append(specs)
    return rounds


# ---- XML ----------------------------------------------------------------


def manifest_to_xml(manifest: ExperimentManifest) -> ET.Element:
    root = ET.Element(
        "experiment",
        {
            "id": manifest.experiment_id,
            "game": manifest.game_id,
            "games_per_match": str(manifest.games_per_match),
            "max_attempts": str(manifest.max_attempts),
            "seed": str(manifest.seed),
            "created_at": manifest.created_at,
        },
    )
    agents = ET.SubElement(root, "agents")
    for a in manifest.agents:
        ET.SubElement(
            agents,
            "agent",
            {
                "id": a.agent_id,
                "name": a.display_name,
                "seed": str(a.network_seed),
                "alpha": xmlio.fmt_float(a.td_params.alpha),
                "gamma": xmlio.fmt_float(a.td_params.gamma),
                "lambda": xmlio.fmt_float(a.td_params.trace_decay),
                "epsilon": xmlio.fmt_float(a.td_params.epsilon),
            },
        )
    return root


def manifest_from_xml(root: ET.Element, validate: bool = True) -> ExperimentManifest:
    if root.tag != "experiment":
        raise ValueError(f"expected <experiment>, got <{root.tag}>")
    agents_el = root.find("agents")
    agents = []
    for el in (agents_el if agents_el is not None else ()):
        agents.append(
            AgentCharacter(
                agent_id=el.attrib["id"],
                display_name=el.attrib.get("name", ""),
                network_seed=int(el.attrib["seed"]),
                td_params=TdParams(
                    alpha=float(el.attrib["alpha"]),
                    gamma=float(el.attrib["gamma"]),
                    trace_decay=float(el.attrib["lambda"]),
                    epsilon=float(el.attrib["epsilon"]),
                ),
            )
        )
    manifest = ExperimentManifest(
        experiment_id=root.attrib["id"],
        game_id=root.attrib["game"],
        agents=tuple(agents),
        games_per_match=int(root.attrib["games_per_match"]),
        max_attempts=int(root.attrib["max_attempts"]),
        seed=int(root.attrib["seed"]),
        created_at=root.attrib.get("created_at", ""),
    )
    if validate:
        manifest.validate()
    return manifest


def load_manifest(path, validate: bool = True) -> ExperimentManifest:
    return manifest_from_xml(xmlio.parse_file(path), validate=validate)


def save_manifest(path, manifest: ExperimentManifest, validate: bool = True) -> None:
    if validate:
        manifest.validate()
    xmlio.write_atomic(path, manifest_to_xml(manifest))
