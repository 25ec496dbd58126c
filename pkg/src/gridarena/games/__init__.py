from gridarena.games.base import (
    AgentConfig,
    GameOutcome,
    GameWorkload,
    MatchResult,
    WorkloadError,
    play_match,
    resolve_workload,
)
from gridarena.games.rsp import RspMove, RspWorkload, compare_moves, play_rsp_game, random_move

__all__ = [
    "AgentConfig",
    "GameOutcome",
    "GameWorkload",
    "MatchResult",
    "RspMove",
    "RspWorkload",
    "WorkloadError",
    "compare_moves",
    "play_match",
    "play_rsp_game",
    "random_move",
    "resolve_workload",
]
