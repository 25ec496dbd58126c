#!/usr/bin/env python3
"""Run a small round-robin experiment end to end on the local backend.

Builds a manifest, exports the workspace, drives the orchestrator to
completion and prints the final report. Equivalent to:

    gridarena new/add-agent/export + gridarena run WORKDIR --local
"""

import argparse
import tempfile
from pathlib import Path

from gridarena.characters import AgentCharacter, TdParams
from gridarena.grid.topology import Cluster, GridTopology
from gridarena.orchestrator import Orchestrator, report_text
from gridarena.tournament import ExperimentManifest, generate_experiment


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--agents", type=int, default=6)
    parser.add_argument("--games", type=int, default=10)
    parser.add_argument("--game", default="rsp", help="rsp or rlgame[:SxBxP[xM]]")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--backend", default="local", choices=["local", "sim"])
    parser.add_argument("--workdir", default=None, help="keep the workspace here")
    args = parser.parse_args()

    agents = tuple(
        AgentCharacter(
            f"agent-{i:02d}",
            TdParams(alpha=0.1, epsilon=0.05 + 0.05 * (i % 4)),
            network_seed=i,
            display_name=f"Agent {i}",
        )
        for i in range(args.agents)
    )
    manifest = ExperimentManifest(
        experiment_id="demo",
        game_id=args.game,
        agents=agents,
        games_per_match=args.games,
        seed=args.seed,
        created_at="2015-09-11T10:00:00+00:00",
    )
    workdir = Path(args.workdir) if args.workdir else Path(tempfile.mkdtemp(prefix="gridarena-"))
    ws = generate_experiment(manifest, workdir / "demo")
    topology = GridTopology((Cluster("c0", 2), Cluster("c1", 2, wn_speed_factor=1.5)))

    orch = Orchestrator(ws, topology, backend=args.backend)
    orch.launch()
    orch.run_to_completion()
    report = orch.finalize()
    orch.shutdown()
    print(report_text(report))
    print(f"workspace kept at {ws.root}")


if __name__ == "__main__":
    main()
