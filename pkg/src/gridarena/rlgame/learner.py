"""TD(lambda) learning on the value network, with afterstate move selection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gridarena.characters import TdParams
from gridarena.rlgame.board import BoardState, RlMove, candidate_features, legal_moves
from gridarena.rlgame.network import ValueNetwork, batch_values, value_gradient


@dataclass
class EligibilityTraces:
    e_w_ih: np.ndarray
    e_b_h: np.ndarray
    e_w_ho: np.ndarray
    e_b_o: float

    @classmethod
    def zeros_like(cls, net: ValueNetwork) -> "EligibilityTraces":
        return cls(
            np.zeros_like(net.w_ih),
            np.zeros_like(net.b_h),
            np.zeros_like(net.w_ho),
            0.0,
        )


def td_update(
    net: ValueNetwork,
    prev_features: np.ndarray,
    next_value_or_outcome: float,
    td_params: TdParams,
    traces: EligibilityTraces,
    terminal: bool = False,
) -> tuple[ValueNetwork, EligibilityTraces]:
    """One TD(lambda) step, in place.

    Non-terminal: delta = gamma * V(next) - V(prev) (no intermediate reward
    in these games). Terminal: delta = outcome - V(prev). Traces decay by
    gamma * lambda, gain the gradient at prev_features, then weights move by
    alpha * delta * traces.
    """
    if traces.e_w_ih.shape != net.w_ih.shape:
        raise ValueError("trace shape does not match network shape")
    v_prev, g_w_ih, g_b_h, g_w_ho, g_b_o = value_gradient(net, prev_features)
    if terminal:
        delta = next_value_or_outcome - v_prev
    else:
        delta = td_params.gamma * next_value_or_outcome - v_prev
    if not np.isfinite(delta):
        raise ArithmeticError(f"non-finite TD error: {delta}")

    decay = td_params.gamma * td_params.trace_decay
    traces.e_w_ih *= decay
    traces.e_w_ih += g_w_ih
    traces.e_b_h *= decay
    traces.e_b_h += g_b_h
    traces.e_w_ho *= decay
    traces.e_w_ho += g_w_ho
    traces.e_b_o = decay * traces.e_b_o + g_b_o

    step = td_params.alpha * delta
    net.w_ih += step * traces.e_w_ih
    net.b_h += step * traces.e_b_h
    net.w_ho += step * traces.e_w_ho
    net.b_o += step * traces.e_b_o
    if not (np.isfinite(net.w_ih).all() and np.isfinite(net.b_h).all()
            and np.isfinite(net.w_ho).all() and np.isfinite(net.b_o)):
        raise ArithmeticError("non-finite network weights after update")
    return net, traces


def rank_moves(net: ValueNetwork, state: BoardState, value_fn=None):
    """Legal moves with their afterstate features and values.

    Returns (moves, features_matrix, values); moves keep the deterministic
    legal_moves order. ``value_fn`` optionally replaces the network forward
    pass (it receives the feature matrix and returns one value per row).
    """
    moves = legal_moves(state)
    if not moves:
        raise ValueError("no legal moves: state is terminal or pawns were not cleaned up")
    feats = candidate_features(state, moves)
    vals = batch_values(net, feats) if value_fn is None else np.asarray(value_fn(feats))
    return moves, feats, vals


def select_move(
    net: ValueNetwork,
    state: BoardState,
    epsilon: float,
    rng: np.random.Generator,
    value_fn=None,
) -> RlMove:
    """Epsilon-greedy afterstate selection; greedy ties go to the first
    move in the deterministic order."""
    moves = legal_moves(state)
    if not moves:
        raise ValueError("no legal moves: state is terminal or pawns were not cleaned up")
    if epsilon > 0 and rng.random() < epsilon:
        return moves[int(rng.integers(len(moves)))]
    _, _, vals = rank_moves(net, state, value_fn=value_fn)
    return moves[int(np.argmax(vals))]
