"""Rock-Scissors-Paper: the builtin example game workload.

Two players pick simultaneously; ROCK beats SCISSORS, SCISSORS beats
PAPER, PAPER beats ROCK. Tournament agents are small history-free
action-value learners parameterized by their character (epsilon=1 recovers
the plain uniform-random computer player).
"""

from __future__ import annotations

from enum import IntEnum
from typing import Protocol, Sequence

import numpy as np

from gridarena.games.base import AgentConfig, GameOutcome, MatchResult, WorkloadError
from gridarena.seeding import make_rng


class RspMove(IntEnum):
    ROCK = 0
    PAPER = 1
    SCISSORS = 2


# move -> the move it beats
_BEATS = {RspMove.ROCK: RspMove.SCISSORS, RspMove.SCISSORS: RspMove.PAPER, RspMove.PAPER: RspMove.ROCK}


def compare_moves(mine: RspMove, theirs: RspMove) -> int:
    """Reward of ``mine`` against ``theirs``: +1 win, 0 draw, -1 loss."""
    if mine == theirs:
        return 0
    return 1 if _BEATS[mine] == theirs else -1


def random_move(rng: np.random.Generator) -> RspMove:
    """Uniform draw over the three moves."""
    return RspMove(int(rng.integers(len(RspMove))))


History = Sequence[tuple[RspMove, RspMove]]


class RspPolicy(Protocol):
    """Chooses the next move given the (own, opponent) pairs played so far."""

    def choose(self, history: History, rng: np.random.Generator) -> RspMove: ...


class UniformRandomPolicy:
    """The plain computer player: ignores history."""

    def choose(self, history: History, rng: np.random.Generator) -> RspMove:
        return random_move(rng)


class FixedPolicy:
    def __init__(self, move: RspMove):
        self.move = move

    def choose(self, history: History, rng: np.random.Generator) -> RspMove:
        return self.move


class BiasedPolicy:
    """Draws from a fixed distribution over (ROCK, PAPER, SCISSORS)."""

    def __init__(self, weights: Sequence[float]):
        w = np.asarray(weights, dtype=float)
        if w.shape != (3,) or w.min() < 0 or w.sum() <= 0:
            raise ValueError(f"weights must be 3 nonnegative values, got {weights}")
        self.probs = w / w.sum()

    def choose(self, history: History, rng: np.random.Generator) -> RspMove:
        return RspMove(int(rng.choice(3, p=self.probs)))


class ActionValueLearnerPolicy:
    """Incremental action-value learner with epsilon-greedy selection.

    Keeps one value estimate per move, updated from the rewards implied by
    the match history: q[m] += alpha * (reward - q[m]). Exploits static
    biases in the opponent; epsilon=1 degenerates to uniform random play.
    """

    def __init__(self, alpha: float = 0.1, epsilon: float = 0.1,
                 q: Sequence[float] | None = None, games_seen: int = 0):
        self.alpha = alpha
        self.epsilon = epsilon
        self.q = np.zeros(3) if q is None else np.asarray(q, dtype=float).copy()
        self.games_seen = games_seen

    def _absorb(self, history: History) -> None:
        for own, opp in history[self.games_seen:]:
            reward = compare_moves(own, opp)
            self.q[own] += self.alpha * (reward - self.q[own])
            self.games_seen += 1

    def choose(self, history: History, rng: np.random.Generator) -> RspMove:
        self._absorb(history)
        if rng.random() < self.epsilon:
            return random_move(rng)
        return RspMove(int(np.argmax(self.q)))


def play_rsp_game(
    policy_a: RspPolicy,
    policy_b: RspPolicy,
    rng_a: np.random.Generator,
    rng_b: np.random.Generator | None = None,
    history_a: History = (),
    history_b: History = (),
) -> tuple[RspMove, RspMove, GameOutcome]:
    """One simultaneous game. Both policies commit before either move is
    revealed; each only ever sees prior games through its history."""
    if rng_b is None:
        rng_b = rng_a
    move_a = policy_a.choose(history_a, rng_a)
    move_b = policy_b.choose(history_b, rng_b)
    if not isinstance(move_a, RspMove) or not isinstance(move_b, RspMove):
        raise WorkloadError(f"policy produced a non-move: {move_a!r} / {move_b!r}")
    return move_a, move_b, GameOutcome(compare_moves(move_a, move_b), compare_moves(move_b, move_a))


_ARTIFACT_MAGIC = "rspq 1"


class RspWorkload:
    """GameWorkload implementation for Rock-Scissors-Paper.

    Agent artifacts carry the learner's action values and game count so
    experience accumulates across tournament rounds.
    """

    game_id = "rsp"

    def initial_artifact(self, character) -> bytes:
        return self._encode(np.zeros(3), 0)

    @staticmethod
    def _encode(q: np.ndarray, games_seen: int) -> bytes:
        lines = [_ARTIFACT_MAGIC, f"games {games_seen}", "q " + " ".join(format(v, ".17g") for v in q)]
        return ("\n".join(lines) + "\n").encode("ascii")

    @staticmethod
    def _decode(blob: bytes) -> tuple[np.ndarray, int]:
        lines = blob.decode("ascii").splitlines()
        if not lines or lines[0] != _ARTIFACT_MAGIC:
            raise WorkloadError(f"bad rsp artifact header: {lines[:1]}")
        games_seen = int(lines[1].split()[1])
        q = np.array([float(v) for v in lines[2].split()[1:]])
        return q, games_seen

    def _policy_for(self, config: AgentConfig) -> ActionValueLearnerPolicy:
        q, games_seen = self._decode(config.artifact)
        td = config.character.td_params
        # games_seen=0 here: the artifact q is already the absorbed state and
        # per-match history starts empty.
        return ActionValueLearnerPolicy(alpha=td.alpha, epsilon=td.epsilon, q=q)

    def play_match(
        self, match_id: str, config_a: AgentConfig, config_b: AgentConfig, games: int, seed: int
    ) -> tuple[MatchResult, bytes, bytes]:
        policy_a = self._policy_for(config_a)
        policy_b = self._policy_for(config_b)
        rng_a = make_rng(seed, 0)
        rng_b = make_rng(seed, 1)
        history_a: list[tuple[RspMove, RspMove]] = []
        history_b: list[tuple[RspMove, RspMove]] = []
        wins_a = wins_b = draws = 0
        log = []
        for _ in range(games):
            move_a, move_b, outcome = play_rsp_game(
                policy_a, policy_b, rng_a, rng_b, history_a, history_b
            )
            history_a.append((move_a, move_b))
            history_b.append((move_b, move_a))
            if outcome.reward_a > 0:
                wins_a += 1
            elif outcome.reward_a < 0:
                wins_b += 1
            else:
                draws += 1
            log.append((move_a.name, move_b.name, outcome.reward_a))
        # flush remaining history into the learners so artifacts are current
        policy_a._absorb(history_a)
        policy_b._absorb(history_b)
        _, seen_a = self._decode(config_a.artifact)
        _, seen_b = self._decode(config_b.artifact)
        result = MatchResult(
            match_id=match_id,
            agent_a=config_a.character.agent_id,
            agent_b=config_b.character.agent_id,
            wins_a=wins_a,
            wins_b=wins_b,
            draws=draws,
            games_played=games,
            per_game_log=tuple(log),
        )
        return (
            result,
            self._encode(policy_a.q, seen_a + games),
            self._encode(policy_b.q, seen_b + games),
        )
