"""XML result document for one match: the payload a job stages back."""

from __future__ import annotations

import xml.etree.ElementTree as ET

from gridarena.games.base import MatchResult
from gridarena import xmlio


def result_to_xml(result: MatchResult) -> ET.Element:
    root = ET.Element(
        "match",
        {
            "id": result.match_id,
            "agent_a": result.agent_a,
            "agent_b": result.agent_b,
            "wins_a": str(result.wins_a),
            "wins_b": str(result.wins_b),
            "draws": str(result.draws),
            "games": str(result.games_played),
        },
    )
    for entry_a, entry_b, reward_a in result.per_game_log:
        ET.SubElement(
            root, "game", {"a": str(entry_a), "b": str(entry_b), "reward_a": str(reward_a)}
        )
    return root


def result_to_bytes(result: MatchResult) -> bytes:
    return xmlio.to_bytes(result_to_xml(result))


def result_from_xml(root: ET.Element) -> MatchResult:
    if root.tag != "match":
        raise ValueError(f"expected <match>, got <{root.tag}>")
    log = tuple(
        (g.attrib["a"], g.attrib["b"], int(g.attrib["reward_a"])) for g in root.findall("game")
    )
    return MatchResult(
        match_id=root.attrib["id"],
        agent_a=root.attrib["agent_a"],
        agent_b=root.attrib["agent_b"],
        wins_a=int(root.attrib["wins_a"]),
        wins_b=int(root.attrib["wins_b"]),
        draws=int(root.attrib["draws"]),
        games_played=int(root.attrib["games"]),
        per_game_log=log,
    )


def result_from_bytes(data: bytes) -> MatchResult:
    return result_from_xml(xmlio.parse_text(data))
