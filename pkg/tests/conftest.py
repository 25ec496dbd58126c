import pytest

from gridarena.characters import AgentCharacter, TdParams
from gridarena.grid.topology import Cluster, GridTopology
from gridarena.tournament import ExperimentManifest, generate_experiment


def build_manifest(n_agents=6, games=10, experiment_id="exp", seed=42, game_id="rsp", **kwargs):
    agents = tuple(
        AgentCharacter(f"a{i:03d}", TdParams(), network_seed=i, display_name=f"Agent {i}")
        for i in range(n_agents)
    )
    return ExperimentManifest(
        experiment_id=experiment_id,
        game_id=game_id,
        agents=agents,
        games_per_match=games,
        seed=seed,
        created_at="2015-09-11T10:00:00+00:00",
        **kwargs,
    )


@pytest.fixture
def two_cluster_topology():
    return GridTopology((Cluster("c0", 2), Cluster("c1", 2)))


@pytest.fixture
def rsp_workspace(tmp_path):
    manifest = build_manifest()
    return generate_experiment(manifest, tmp_path / "exp"), manifest
