from gridarena.tournament.manifest import (
    ExperimentManifest,
    ExperimentTotals,
    MatchSpec,
    experiment_totals,
    load_manifest,
    manifest_from_xml,
    manifest_to_xml,
    save_manifest,
    schedule_matches,
)
from gridarena.tournament.schedule import round_robin_schedule
from gridarena.tournament.segment import DEFAULT_GAME_SECONDS, segment_experiment
from gridarena.tournament.standings import Standings, StandingsRow, compute_standings
from gridarena.tournament.workspace import Workspace, generate_experiment

__all__ = [
    "DEFAULT_GAME_SECONDS",
    "ExperimentManifest",
    "ExperimentTotals",
    "MatchSpec",
    "Standings",
    "StandingsRow",
    "Workspace",
    "compute_standings",
    "experiment_totals",
    "generate_experiment",
    "load_manifest",
    "manifest_from_xml",
    "manifest_to_xml",
    "round_robin_schedule",
    "save_manifest",
    "schedule_matches",
    "segment_experiment",
]
