"""Circle-method round-robin pairing.

One participant stays fixed while the rest rotate; every unordered pair
meets exactly once. Even fields give N-1 rounds of perfect matchings; odd
fields get a rotating bye (N rounds, one bye each).
"""

from __future__ import annotations

from typing import Sequence

_BYE = None


def round_robin_schedule(agent_ids: Sequence[str]) -> list[list[tuple[str, str]]]:
    ids = list(agent_ids)
    if len(ids) < 2:
        raise ValueError(f"need at least 2 participants, got {len(ids)}")
    if len(set(ids)) != len(ids):
        dupes = sorted({x for x in ids if ids.count(x) > 1})
        raise ValueError(f"duplicate participant ids: {dupes}")

    seats: list[str | None] = list(ids)
    if len(seats) % 2:
        seats.append(_BYE)
    m = len(seats)

    rounds = []
    rotating = seats[1:]
    for _ in range(m - 1):
        table = [seats[0]] + rotating
        pairs = []
        for i in range(m // 2):
            a, b = table[i], table[m - 1 - i]
            if a is not _BYE and b is not _BYE:
                pairs.append((a, b))
        rounds.append(pairs)
        rotating = rotating[-1:] + rotating[:-1]
    return rounds
