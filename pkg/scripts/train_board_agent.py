#!/usr/bin/env python3
"""Self-play TD training on the board game, then evaluation vs random.

One shared value network plays both sides; every few hundred games the
greedy policy is pitted against a uniform-random mover to track progress.
"""

import argparse
import time

from gridarena.characters import TdParams
from gridarena.rlgame.board import WHITE, BoardParams, _afterstate, initial_board, legal_moves, terminal
from gridarena.rlgame.learner import select_move
from gridarena.rlgame.network import init_network
from gridarena.rlgame.workload import _Side, play_learning_game
from gridarena.seeding import make_rng


def evaluate(net, params, games, rng):
    wins = 0
    for game in range(games):
        trained_is_white = game % 2 == 0
        state = initial_board(params)
        while (result := terminal(state)) is None:
            if (state.to_move == WHITE) == trained_is_white:
                mv = select_move(net, state, 0.0, rng)
            else:
                moves = legal_moves(state)
                mv = moves[int(rng.integers(len(moves)))]
            state = _afterstate(state, mv)
        if result != 0 and (result == WHITE) == trained_is_white:
            wins += 1
    return wins / games


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--board", default="5x2x2", help="SxBxP geometry")
    parser.add_argument("--games", type=int, default=5000)
    parser.add_argument("--eval-games", type=int, default=200)
    parser.add_argument("--eval-every", type=int, default=500)
    parser.add_argument("--alpha", type=float, default=0.1)
    parser.add_argument("--epsilon", type=float, default=0.1)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    size, base, pawns = (int(v) for v in args.board.split("x"))
    params = BoardParams(size, base, pawns)
    net = init_network(params.feature_size, seed=args.seed)
    td = TdParams(alpha=args.alpha, epsilon=args.epsilon)
    white = _Side(net=net, td=td, rng=make_rng(args.seed, 0))
    black = _Side(net=net, td=td, rng=make_rng(args.seed, 1))
    eval_rng = make_rng(args.seed, 2)

    start = time.time()
    for game in range(1, args.games + 1):
        play_learning_game(white, black, params)
        if game % args.eval_every == 0 or game == args.games:
            rate = evaluate(net, params, args.eval_games, eval_rng)
            print(
                f"game {game:>6}: win rate vs random {rate:5.1%} "
                f"({time.time() - start:6.1f} s elapsed)"
            )


if __name__ == "__main__":
    main()
