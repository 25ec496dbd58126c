from gridarena.rlgame.board import (
    BLACK,
    WHITE,
    BoardParams,
    BoardState,
    RlMove,
    apply_move,
    encode_features,
    initial_board,
    legal_moves,
    terminal,
)
from gridarena.rlgame.learner import EligibilityTraces, select_move, td_update
from gridarena.rlgame.network import ValueNetwork, value
from gridarena.rlgame.workload import RlGameWorkload, parse_board_spec

__all__ = [
    "BLACK",
    "WHITE",
    "BoardParams",
    "BoardState",
    "EligibilityTraces",
    "RlMove",
    "RlGameWorkload",
    "ValueNetwork",
    "apply_move",
    "encode_features",
    "initial_board",
    "legal_moves",
    "parse_board_spec",
    "select_move",
    "td_update",
    "terminal",
    "value",
]
