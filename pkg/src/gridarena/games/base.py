"""Game workload contract: the unit of work one grid job executes.

A workload plays a fixed-length match between two configured agents and
returns the result together with each agent's updated artifact (learned
state), so the orchestrator can stage the new data back for later rounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

from gridarena.characters import AgentCharacter


class WorkloadError(Exception):
    """A match could not be completed; partial results are discarded."""


@dataclass(frozen=True)
class GameOutcome:
    """Zero-sum per-game rewards for the two sides."""

    reward_a: int
    reward_b: int

    def __post_init__(self) -> None:
        if self.reward_a + self.reward_b != 0:
            raise ValueError(f"outcome must be zero-sum, got ({self.reward_a}, {self.reward_b})")
        if self.reward_a not in (-1, 0, 1):
            raise ValueError(f"rewards must be in {{-1, 0, 1}}, got {self.reward_a}")


@dataclass(frozen=True)
class MatchResult:
    match_id: str
    agent_a: str
    agent_b: str
    wins_a: int
    wins_b: int
    draws: int
    games_played: int
    # For move-list games each entry is (move_a, move_b, reward_a); games with
    # larger transcripts store an opaque per-game reference string instead.
    per_game_log: tuple = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.wins_a + self.wins_b + self.draws != self.games_played:
            raise ValueError(
                "game counts must conserve: "
                f"{self.wins_a}+{self.wins_b}+{self.draws} != {self.games_played}"
            )


@dataclass(frozen=True)
class AgentConfig:
    """A character plus its current artifact bytes (learned state)."""

    character: AgentCharacter
    artifact: bytes


@runtime_checkable
class GameWorkload(Protocol):
    """Deterministic match runner: identical inputs (incl. seed) give an
    identical MatchResult and identical updated artifacts."""

    game_id: str

    def initial_artifact(self, character: AgentCharacter) -> bytes: ...

    def play_match(
        self, match_id: str, config_a: AgentConfig, config_b: AgentConfig, games: int, seed: int
    ) -> tuple[MatchResult, bytes, bytes]: ...


def play_match(
    workload: GameWorkload,
    match_id: str,
    config_a: AgentConfig,
    config_b: AgentConfig,
    games: int,
    seed: int,
) -> tuple[MatchResult, bytes, bytes]:
    """Run one match through a workload, enforcing the match contract.

    Any exception from the workload aborts the whole match: the partial
    result is discarded and a WorkloadError is raised so the job layer can
    report the attempt as failed (and resubmission can retry it).
    """
    if games < 1:
        raise ValueError(f"games must be >= 1, got {games}")
    try:
        result, art_a, art_b = workload.play_match(match_id, config_a, config_b, games, seed)
    except WorkloadError:
        raise
    except Exception as exc:
        raise WorkloadError(f"match {match_id} aborted: {exc}") from exc
    if result.games_played != games:
        raise WorkloadError(
            f"match {match_id} played {result.games_played} games, expected {games}"
        )
    return result, art_a, art_b


def resolve_workload(game_id: str) -> GameWorkload:
    """Look up a workload by manifest game id.

    ``rsp`` is the builtin example game; ``rlgame`` accepts an optional
    geometry suffix like ``rlgame:5x2x2`` (board size x base size x pawns).
    """
    from gridarena.games.rsp import RspWorkload
    from gridarena.rlgame.workload import RlGameWorkload, parse_board_spec

    if game_id == "rsp":
        return RspWorkload()
    if game_id == "rlgame" or game_id.startswith("rlgame:"):
        return RlGameWorkload(parse_board_spec(game_id))
    raise ValueError(f"unknown game_id: {game_id!r}")
