"""Tournament tables: match points and aggregate game counts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from gridarena.games.base import MatchResult
from gridarena.tournament.manifest import ExperimentManifest, schedule_matches

WIN_POINTS = 3
DRAW_POINTS = 1


@dataclass(frozen=True)
class StandingsRow:
    agent_id: str
    matches_played: int
    match_wins: int
    match_draws: int
    match_losses: int
    game_wins: int
    game_losses: int
    game_draws: int
    points: int


@dataclass(frozen=True)
class Standings:
    rows: tuple[StandingsRow, ...]

    def row(self, agent_id: str) -> StandingsRow:
        for r in self.rows:
            if r.agent_id == agent_id:
                return r
        raise KeyError(f"no agent {agent_id!r}")


def match_winner(result: MatchResult) -> str | None:
    """Agent id of the match winner (majority of game wins), None for a
    drawn match."""
    if result.wins_a > result.wins_b:
        return result.agent_a
    if result.wins_b > result.wins_a:
        return result.agent_b
    return None


def compute_standings(
    results: Iterable[MatchResult],
    manifest: ExperimentManifest,
    forfeited_match_ids: Sequence[str] = (),
) -> Standings:
    """Rows ordered by points desc, then game wins desc, then agent id.

    Results may be partial. Forfeited matches (both sides permanently
    failed) count as played with zero points so the table stays total.
    """
    known = {ms.match_id: ms for rnd in schedule_matches(manifest) for ms in rnd}
    tally = {
        a.agent_id: dict.fromkeys(
            ("matches", "mwins", "mdraws", "mlosses", "gwins", "glosses", "gdraws"), 0
        )
        for a in manifest.agents
    }
    seen: set[str] = set()
    for result in results:
        spec = known.get(result.match_id)
        if spec is None:
            raise KeyError(f"result for unknown match {result.match_id!r}")
        if result.match_id in seen:
            raise ValueError(f"duplicate result for match {result.match_id!r}")
        seen.add(result.match_id)
        if {result.agent_a, result.agent_b} != {spec.agent_a, spec.agent_b}:
            raise ValueError(
                f"result agents {result.agent_a}/{result.agent_b} do not match "
                f"schedule for {result.match_id}"
            )
        a, b = tally[result.agent_a], tally[result.agent_b]
        a["matches"] += 1
        b["matches"] += 1
        a["gwins"] += result.wins_a
        a["glosses"] += result.wins_b
        a["gdraws"] += result.draws
        b["gwins"] += result.wins_b
        b["glosses"] += result.wins_a
        b["gdraws"] += result.draws
        winner = match_winner(result)
        if winner is None:
            a["mdraws"] += 1
            b["mdraws"] += 1
        elif winner == result.agent_a:
            a["mwins"] += 1
            b["mlosses"] += 1
        else:
            b["mwins"] += 1
            a["mlosses"] += 1

    for match_id in forfeited_match_ids:
        spec = known.get(match_id)
        if spec is None:
            raise KeyError(f"forfeit for unknown match {match_id!r}")
        if match_id in seen:
            raise ValueError(f"match {match_id!r} both collected and forfeited")
        seen.add(match_id)
        tally[spec.agent_a]["matches"] += 1
        tally[spec.agent_b]["matches"] += 1

    rows = [
        StandingsRow(
            agent_id=agent_id,
            matches_played=t["matches"],
            match_wins=t["mwins"],
            match_draws=t["mdraws"],
            match_losses=t["mlosses"],
            game_wins=t["gwins"],
            game_losses=t["glosses"],
            game_draws=t["gdraws"],
            points=WIN_POINTS * t["mwins"] + DRAW_POINTS * t["mdraws"],
        )
        for agent_id, t in tally.items()
    ]
    rows.sort(key=lambda r: (-r.points, -r.game_wins, r.agent_id))
    return Standings(tuple(rows))
