"""Decompose an experiment into autonomous grid jobs, one per match.

Each job consumes both agents' current artifacts (their state entering the
round) and declares the match result plus both updated artifacts as
outputs, so round r+1 inputs chain onto round r outputs.
"""

from __future__ import annotations

from gridarena.grid.jobs import ArtifactRef, JobSpec, WorkloadCall
from gridarena.tournament.manifest import ExperimentManifest, schedule_matches

# nominal virtual cost per game; 100-game matches land on the one-minute
# ballpark a desktop run takes
DEFAULT_GAME_SECONDS = 0.6


def artifact_name(agent_id: str, version: int) -> str:
    """Logical name of an agent's state after ``version`` rounds."""
    return f"agents/{agent_id}/r{version:03d}"


def result_name(match_id: str) -> str:
    return f"results/{match_id}"


def segment_experiment(
    manifest: ExperimentManifest, game_seconds: float = DEFAULT_GAME_SECONDS
) -> list[JobSpec]:
    """One JobSpec per match, in round order. Input refs are logical (no
    digests yet): the bytes for round r only exist once round r-1 staged
    its outputs back."""
    specs = []
    for round_specs in schedule_matches(manifest):
        for ms in round_specs:
            in_a = artifact_name(ms.agent_a, ms.round_index)
            in_b = artifact_name(ms.agent_b, ms.round_index)
            out_result = result_name(ms.match_id)
            out_a = artifact_name(ms.agent_a, ms.round_index + 1)
            out_b = artifact_name(ms.agent_b, ms.round_index + 1)
            call = WorkloadCall(
                game_id=manifest.game_id,
                match_id=ms.match_id,
                character_a=manifest.agent(ms.agent_a),
                character_b=manifest.agent(ms.agent_b),
                games=ms.games,
                seed=ms.seed,
                input_a=in_a,
                input_b=in_b,
                output_result=out_result,
                output_a=out_a,
                output_b=out_b,
            )
            specs.append(
                JobSpec(
                    job_spec_id=ms.match_id,
                    input_refs=(ArtifactRef(in_a), ArtifactRef(in_b)),
                    output_names=(out_result, out_a, out_b),
                    compute_seconds=ms.games * game_seconds,
                    workload=call,
                    match_id=ms.match_id,
                    round_index=ms.round_index,
                )
            )
    return specs
