"""Two-player base-raid board game used as the main learning workload.

Rules: a square board with an own base in each of two opposite corners,
initially holding each player's pawns. Pawns move one square orthogonally
onto empty cells; a pawn that has left its own base may never re-enter it.
Entering the opponent's base wins immediately, as does the opponent running
out of pawns. A pawn with no legal move at the start of its owner's turn is
forced off the board. Games exceeding the move cap are draws.

Since every pawn starts inside its base and moves one step at a time, the
has-left-base flag is exactly "currently outside own base", so it is not
stored separately. The board is a flat tuple (index = row * size + col):
positions are tiny and the self-play loop touches them millions of times,
so geometry is precomputed per (size, base_size) and the hot path avoids
numpy until the feature matrix is assembled.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

WHITE = 1
BLACK = -1

EMPTY = 0


@lru_cache(maxsize=None)
def _geometry(size: int, base_size: int):
    n, a = size, base_size
    neighbors = []
    for idx in range(n * n):
        r, c = divmod(idx, n)
        cell = []
        if r > 0:
            cell.append(idx - n)
        if c > 0:
            cell.append(idx - 1)
        if c < n - 1:
            cell.append(idx + 1)
        if r < n - 1:
            cell.append(idx + n)
        neighbors.append(tuple(cell))
    white_base = tuple(r * n + c for r in range(a) for c in range(a))
    black_base = tuple(r * n + c for r in range(n - a, n) for c in range(n - a, n))
    return tuple(neighbors), white_base, frozenset(white_base), black_base, frozenset(black_base)


@dataclass(frozen=True)
class BoardParams:
    size: int = 8
    base_size: int = 2
    pawns_per_player: int = 4
    max_moves: int = 1000

    def __post_init__(self) -> None:
        if not 2 <= self.base_size < self.size:
            raise ValueError(
                f"base_size must satisfy 2 <= base_size < size, got "
                f"base_size={self.base_size}, size={self.size}"
            )
        if 2 * self.base_size > self.size:
            raise ValueError(
                f"bases must not overlap: need 2 * base_size <= size, got "
                f"base_size={self.base_size}, size={self.size}"
            )
        if not 1 <= self.pawns_per_player <= self.base_size**2:
            raise ValueError(
                f"pawns_per_player must be in [1, base_size^2], got {self.pawns_per_player}"
            )
        if self.max_moves < 1:
            raise ValueError(f"max_moves must be >= 1, got {self.max_moves}")

    @property
    def feature_size(self) -> int:
        """Value-net input width: one entry per cell plus two coverage flags."""
        return self.size * self.size + 2

    def base_cells(self, player: int) -> tuple[int, ...]:
        """Flat indices of a player's own base, row-major. White owns the
        top-left corner, black the bottom-right."""
        geo = _geometry(self.size, self.base_size)
        return geo[1] if player == WHITE else geo[3]

    def base_set(self, player: int) -> frozenset[int]:
        geo = _geometry(self.size, self.base_size)
        return geo[2] if player == WHITE else geo[4]

    def neighbors(self, idx: int) -> tuple[int, ...]:
        return _geometry(self.size, self.base_size)[0][idx]


@dataclass(frozen=True)
class RlMove:
    src: int
    dst: int


@dataclass(frozen=True)
class BoardState:
    params: BoardParams
    cells: tuple[int, ...]
    to_move: int
    move_count: int


def initial_board(params: BoardParams) -> BoardState:
    cells = [EMPTY] * (params.size * params.size)
    for player in (WHITE, BLACK):
        for idx in params.base_cells(player)[: params.pawns_per_player]:
            cells[idx] = player
    return BoardState(params, tuple(cells), WHITE, 0)


def has_left_base(state: BoardState, idx: int) -> bool:
    """Whether the pawn on ``idx`` has permanently left its own base."""
    player = state.cells[idx]
    if player == EMPTY:
        raise ValueError(f"cell {idx} holds no pawn")
    return idx not in state.params.base_set(player)


def _pawn_dests(params: BoardParams, cells, idx: int, player: int):
    base = params.base_set(player)
    if idx in base:
        return [d for d in params.neighbors(idx) if cells[d] == EMPTY]
    return [d for d in params.neighbors(idx) if cells[d] == EMPTY and d not in base]


def legal_moves(state: BoardState) -> list[RlMove]:
    """All moves for the side to move, sorted by (src, dst). Empty for
    terminal positions."""
    if terminal(state) is not None:
        return []
    p = state.params
    cells = state.cells
    player = state.to_move
    moves = []
    for idx, occ in enumerate(cells):
        if occ == player:
            for dst in _pawn_dests(p, cells, idx, player):
                moves.append(RlMove(idx, dst))
    moves.sort(key=lambda m: (m.src, m.dst))
    return moves


def _check_move(state: BoardState, mv: RlMove) -> str | None:
    p = state.params
    ncells = p.size * p.size
    if not (0 <= mv.src < ncells and 0 <= mv.dst < ncells):
        return "move is off the board"
    if terminal(state) is not None:
        return "game is already over"
    if state.cells[mv.src] != state.to_move:
        return "source cell does not hold a pawn of the side to move"
    if state.cells[mv.dst] != EMPTY:
        return "destination cell is occupied"
    if mv.dst not in p.neighbors(mv.src):
        return "cells are not orthogonally adjacent"
    base = p.base_set(state.to_move)
    if mv.src not in base and mv.dst in base:
        return "pawn may not re-enter its own base"
    return None


def _afterstate(state: BoardState, mv: RlMove) -> BoardState:
    """Apply a known-legal move: relocate, flip the mover, then force any
    stranded pawns of the next mover off the board."""
    p = state.params
    cells = list(state.cells)
    mover = state.to_move
    cells[mv.src] = EMPTY
    cells[mv.dst] = mover
    nxt = -mover

    # win by entering the opponent base short-circuits the stranded scan
    if mv.dst in p.base_set(nxt):
        return BoardState(p, tuple(cells), nxt, state.move_count + 1)

    # simultaneous scan: removals only ever free cells, so one pass suffices
    stranded = [
        idx
        for idx, occ in enumerate(cells)
        if occ == nxt and not _pawn_dests(p, cells, idx, nxt)
    ]
    for idx in stranded:
        cells[idx] = EMPTY
    return BoardState(p, tuple(cells), nxt, state.move_count + 1)


def apply_move(state: BoardState, mv: RlMove) -> BoardState:
    reason = _check_move(state, mv)
    if reason is not None:
        raise ValueError(f"illegal move {mv.src}->{mv.dst}: {reason}")
    return _afterstate(state, mv)


def _winner_on_board(state: BoardState) -> int | None:
    """Win by base entry or by the opponent having no pawns; None otherwise."""
    p = state.params
    cells = state.cells
    whites = blacks = 0
    for occ in cells:
        if occ == WHITE:
            whites += 1
        elif occ == BLACK:
            blacks += 1
    for idx in p.base_cells(BLACK):
        if cells[idx] == WHITE:
            return WHITE
    for idx in p.base_cells(WHITE):
        if cells[idx] == BLACK:
            return BLACK
    if whites == 0:
        return BLACK
    if blacks == 0:
        return WHITE
    return None


def terminal(state: BoardState) -> int | None:
    """None while the game runs; WHITE/BLACK for a win; 0 for a capped draw."""
    win = _winner_on_board(state)
    if win is not None:
        return win
    if state.move_count >= state.params.max_moves:
        return 0
    return None


def features_of(state: BoardState, perspective: int) -> np.ndarray:
    """Cells as +1 own / -1 opponent / 0 empty plus the two coverage flags
    (fraction of each side's pawns outside their own base; 1.0 for a side
    with no pawns left: all were forced out)."""
    p = state.params
    own_base = p.base_set(perspective)
    opp_base = p.base_set(-perspective)
    own = own_out = opp = opp_out = 0
    row = [0.0] * p.feature_size
    for idx, occ in enumerate(state.cells):
        if occ == EMPTY:
            continue
        if occ == perspective:
            row[idx] = 1.0
            own += 1
            own_out += idx not in own_base
        else:
            row[idx] = -1.0
            opp += 1
            opp_out += idx not in opp_base
    row[-2] = own_out / own if own else 1.0
    row[-1] = opp_out / opp if opp else 1.0
    return np.array(row)


def encode_features(state: BoardState, mv: RlMove) -> np.ndarray:
    """Feature vector of the position after ``mv`` (which must be legal),
    from the mover's perspective."""
    return features_of(_afterstate(state, mv), state.to_move)


def candidate_features(state: BoardState, moves: list[RlMove]) -> np.ndarray:
    """Feature rows for every candidate move, as one (len(moves), F) matrix."""
    p = state.params
    mat = np.empty((len(moves), p.feature_size))
    mover = state.to_move
    for i, mv in enumerate(moves):
        mat[i] = features_of(_afterstate(state, mv), mover)
    return mat
