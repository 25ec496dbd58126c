"""Self-play match workload for the board game: both sides learn online."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from gridarena.characters import AgentCharacter, TdParams
from gridarena.games.base import AgentConfig, MatchResult
from gridarena.rlgame.board import (
    WHITE,
    BoardParams,
    _afterstate,
    candidate_features,
    encode_features,
    initial_board,
    legal_moves,
    terminal,
)
from gridarena.rlgame.learner import EligibilityTraces, td_update
from gridarena.rlgame.network import (
    ValueNetwork,
    batch_values,
    init_network,
    network_from_text,
    network_to_text,
    value,
)
from gridarena.seeding import make_rng


def parse_board_spec(game_id: str) -> BoardParams:
    """``rlgame`` for the default board, or ``rlgame:SxBxP[xM]`` for
    board size, base size, pawns per player and optional move cap."""
    if game_id == "rlgame":
        return BoardParams()
    spec = game_id.split(":", 1)[1]
    parts = [int(p) for p in spec.split("x")]
    if len(parts) == 3:
        return BoardParams(*parts)
    if len(parts) == 4:
        return BoardParams(parts[0], parts[1], parts[2], max_moves=parts[3])
    raise ValueError(f"bad board spec {game_id!r}, expected rlgame:SxBxP[xM]")


@dataclass
class _Side:
    net: ValueNetwork
    td: TdParams
    rng: np.random.Generator
    traces: EligibilityTraces = field(init=False)
    last_feats: np.ndarray | None = field(init=False, default=None)

    def __post_init__(self) -> None:
        self.reset()

    def reset(self) -> None:
        self.traces = EligibilityTraces.zeros_like(self.net)
        self.last_feats = None


def play_learning_game(white: _Side, black: _Side, params: BoardParams) -> int:
    """One self-play game with TD updates for both sides; returns the
    terminal result (WHITE, BLACK, or 0 for a capped draw)."""
    white.reset()
    black.reset()
    state = initial_board(params)
    sides = {WHITE: white, -WHITE: black}
    while True:
        result = terminal(state)
        if result is not None:
            break
        side = sides[state.to_move]
        moves = legal_moves(state)
        if side.td.epsilon > 0 and side.rng.random() < side.td.epsilon:
            mv = moves[int(side.rng.integers(len(moves)))]
            feats = encode_features(state, mv)
            chosen_value = value(side.net, feats)
        else:
            all_feats = candidate_features(state, moves)
            vals = batch_values(side.net, all_feats)
            pick = int(np.argmax(vals))
            mv, feats, chosen_value = moves[pick], all_feats[pick], float(vals[pick])
        if side.last_feats is not None:
            td_update(side.net, side.last_feats, chosen_value, side.td, side.traces)
        side.last_feats = feats
        state = _afterstate(state, mv)

    for player, side in sides.items():
        if side.last_feats is None:
            continue
        outcome = 0.5 if result == 0 else (1.0 if result == player else 0.0)
        td_update(side.net, side.last_feats, outcome, side.td, side.traces, terminal=True)
    return result


class RlGameWorkload:
    """GameWorkload running learning self-play on a fixed board geometry.

    Artifacts are the serialized value networks; the match returns the
    updated networks so experience carries across tournament rounds. The
    first mover alternates between the two agents game by game.
    """

    def __init__(self, params: BoardParams | None = None):
        self.params = params or BoardParams()
        self.game_id = (
            "rlgame"
            if self.params == BoardParams()
            else "rlgame:{p.size}x{p.base_size}x{p.pawns_per_player}x{p.max_moves}".format(
                p=self.params
            )
        )

    def initial_artifact(self, character: AgentCharacter) -> bytes:
        net = init_network(self.params.feature_size, character.network_seed)
        return network_to_text(net).encode("ascii")

    def play_match(
        self, match_id: str, config_a: AgentConfig, config_b: AgentConfig, games: int, seed: int
    ) -> tuple[MatchResult, bytes, bytes]:
        side_a = _Side(
            net=network_from_text(config_a.artifact.decode("ascii")),
            td=config_a.character.td_params,
            rng=make_rng(seed, 0),
        )
        side_b = _Side(
            net=network_from_text(config_b.artifact.decode("ascii")),
            td=config_b.character.td_params,
            rng=make_rng(seed, 1),
        )
        wins_a = wins_b = draws = 0
        log = []
        for game in range(games):
            a_is_white = game % 2 == 0
            white, black = (side_a, side_b) if a_is_white else (side_b, side_a)
            result = play_learning_game(white, black, self.params)
            if result == 0:
                draws += 1
                log.append(("draw", "-", 0))
            else:
                a_won = (result == WHITE) == a_is_white
                if a_won:
                    wins_a += 1
                else:
                    wins_b += 1
                log.append(("win_a" if a_won else "win_b", "white" if result == WHITE else "black", 1 if a_won else -1))
        match = MatchResult(
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
            match,
            network_to_text(side_a.net).encode("ascii"),
            network_to_text(side_b.net).encode("ascii"),
        )
