import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridarena.characters import AgentCharacter, TdParams
from gridarena.games.base import MatchResult
from gridarena.tournament import (
    ExperimentManifest,
    compute_standings,
    experiment_totals,
    round_robin_schedule,
    schedule_matches,
    segment_experiment,
)
from gridarena.tournament.segment import artifact_name


def make_manifest(n_agents, games=10, experiment_id="exp", seed=42, **kwargs):
    agents = tuple(AgentCharacter(f"a{i:03d}", TdParams(), network_seed=i) for i in range(n_agents))
    return ExperimentManifest(
        experiment_id=experiment_id,
        game_id="rsp",
        agents=agents,
        games_per_match=games,
        seed=seed,
        **kwargs,
    )


def all_pairs(ids):
    return {frozenset(p) for p in itertools.combinations(ids, 2)}


def test_two_participants_one_round_one_match():
    rounds = round_robin_schedule(["x", "y"])
    assert rounds == [[("x", "y")]]


def test_four_participants_three_perfect_rounds():
    ids = ["a", "b", "c", "d"]
    rounds = round_robin_schedule(ids)
    assert len(rounds) == 3
    seen = set()
    for rnd in rounds:
        assert len(rnd) == 2
        agents = [x for pair in rnd for x in pair]
        assert sorted(agents) == sorted(ids)  # perfect matching
        seen.update(frozenset(p) for p in rnd)
    assert seen == all_pairs(ids)


def test_duplicate_ids_rejected():
    with pytest.raises(ValueError, match="duplicate"):
        round_robin_schedule(["a", "b", "a"])
    with pytest.raises(ValueError, match="at least 2"):
        round_robin_schedule(["a"])


def test_schedule_covers_all_pairs_for_all_small_sizes():
    for n in range(2, 21):
        ids = [f"p{i}" for i in range(n)]
        rounds = round_robin_schedule(ids)
        flat = [frozenset(p) for rnd in rounds for p in rnd]
        assert len(flat) == n * (n - 1) // 2
        assert set(flat) == all_pairs(ids)
        assert len(set(flat)) == len(flat)
        if n % 2 == 0:
            assert len(rounds) == n - 1
            for rnd in rounds:
                assert sorted(x for pair in rnd for x in pair) == sorted(ids)
        else:
            assert len(rounds) == n
            for rnd in rounds:
                agents = [x for pair in rnd for x in pair]
                assert len(agents) == len(set(agents)) == n - 1  # one bye


def test_schedule_is_deterministic_in_input_order():
    ids = [f"p{i}" for i in range(7)]
    assert round_robin_schedule(ids) == round_robin_schedule(ids)
    assert round_robin_schedule(ids) != round_robin_schedule(list(reversed(ids)))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 40))
def test_pair_coverage_property(n):
    ids = [f"p{i}" for i in range(n)]
    flat = [frozenset(p) for rnd in round_robin_schedule(ids) for p in rnd]
    assert sorted(map(sorted, flat)) == sorted(map(sorted, all_pairs(ids)))


def test_totals_at_tournament_scale():
    totals = experiment_totals(make_manifest(126, games=100))
    assert totals.total_matches == 7_875
    assert totals.per_agent_games == 12_500
    assert totals.participation_games == 1_575_000
    assert totals.unique_games == 787_500
    assert totals.participation_games == 2 * totals.unique_games


def test_totals_tiny():
    totals = experiment_totals(make_manifest(2, games=1))
    assert totals.total_matches == 1
    assert totals.unique_games == 1
    assert totals.per_agent_games == 1
    assert totals.participation_games == 2


def test_match_specs_unique_ids_and_seeds():
    rounds = schedule_matches(make_manifest(6))
    specs = [ms for rnd in rounds for ms in rnd]
    assert len(specs) == 15
    assert len({ms.match_id for ms in specs}) == 15
    assert len({ms.seed for ms in specs}) == 15
    assert all(ms.agent_a != ms.agent_b for ms in specs)
    # deterministic regeneration
    again = [ms for rnd in schedule_matches(make_manifest(6)) for ms in rnd]
    assert specs == again
    # different root seed moves every match seed
    other = [ms for rnd in schedule_matches(make_manifest(6, seed=43)) for ms in rnd]
    assert all(a.seed != b.seed for a, b in zip(specs, other))


def test_manifest_validation_errors_listed():
    manifest = make_manifest(2)
    bad = ExperimentManifest(
        experiment_id="",
        game_id="rsp",
        agents=manifest.agents[:1],
        games_per_match=0,
    )
    errors = bad.validation_errors()
    assert len(errors) == 3
    with pytest.raises(ValueError, match="at least 2 agents"):
        bad.validate()


def test_segmentation_counts():
    specs = segment_experiment(make_manifest(126, games=100))
    assert len(specs) == 7_875

    two = segment_experiment(make_manifest(2))
    assert len(two) == 1
    assert len(two[0].input_refs) == 2
    assert len(two[0].output_names) == 3  # result + both updated artifacts


def test_segmentation_round_dependencies():
    manifest = make_manifest(8)
    specs = segment_experiment(manifest)
    produced_by_round = {0: {artifact_name(a.agent_id, 0) for a in manifest.agents}}
    for spec in specs:
        rnd = spec.round_index
        produced_by_round.setdefault(rnd + 1, set()).update(
            n for n in spec.output_names if not n.startswith("results/")
        )
    for spec in specs:
        available = set().union(*(produced_by_round[r] for r in range(spec.round_index + 1)))
        for ref in spec.input_refs:
            assert ref.name in available, (spec.job_spec_id, ref.name)
        # inputs name exactly this round's entry version for both agents
        call = spec.workload
        assert artifact_name(call.character_a.agent_id, spec.round_index) == call.input_a
        assert artifact_name(call.character_b.agent_id, spec.round_index) == call.input_b


def test_segmentation_compute_cost_scales_with_games():
    specs = segment_experiment(make_manifest(2, games=100))
    assert specs[0].compute_seconds == pytest.approx(60.0)


def _result(match_id, a, b, wins_a, wins_b, draws):
    games = wins_a + wins_b + draws
    return MatchResult(match_id, a, b, wins_a, wins_b, draws, games)


def test_standings_empty_results():
    manifest = make_manifest(5)
    table = compute_standings([], manifest)
    assert len(table.rows) == 5
    assert all(r.points == 0 and r.matches_played == 0 for r in table.rows)
    assert [r.agent_id for r in table.rows] == sorted(a.agent_id for a in manifest.agents)


def test_standings_two_agents_single_match():
    manifest = make_manifest(2)
    (ms,) = [m for rnd in schedule_matches(manifest) for m in rnd]
    table = compute_standings([_result(ms.match_id, ms.agent_a, ms.agent_b, 7, 2, 1)], manifest)
    assert table.row(ms.agent_a).points == 3
    assert table.row(ms.agent_b).points == 0
    assert table.rows[0].agent_id == ms.agent_a


def test_standings_four_agents_hand_computed():
    manifest = make_manifest(4, games=4)
    specs = {ms.match_id: ms for rnd in schedule_matches(manifest) for ms in rnd}
    # hand-built tournament: a000 wins all; a001 draws a002; a003 loses all
    results = []
    for ms in specs.values():
        pair = {ms.agent_a, ms.agent_b}
        if "a000" in pair:
            wins_a = 4 if ms.agent_a == "a000" else 0
            results.append(_result(ms.match_id, ms.agent_a, ms.agent_b, wins_a, 4 - wins_a, 0))
        elif pair == {"a001", "a002"}:
            results.append(_result(ms.match_id, ms.agent_a, ms.agent_b, 2, 2, 0))
        else:  # a003 against a001/a002
            wins_a = 0 if ms.agent_a == "a003" else 4
            results.append(_result(ms.match_id, ms.agent_a, ms.agent_b, wins_a, 4 - wins_a, 0))
    table = compute_standings(results, manifest)
    # expected: a000 9 pts; a001/a002 4 pts each (1 win 1 draw 1 loss); a003 0
    assert [r.agent_id for r in table.rows][0] == "a000"
    assert table.row("a000").points == 9
    assert table.row("a001").points == 4
    assert table.row("a002").points == 4
    assert table.row("a003").points == 0
    assert sum(r.game_wins for r in table.rows) == sum(r.game_losses for r in table.rows)
    assert all(r.matches_played == 3 for r in table.rows)


def test_standings_rejects_unknown_and_duplicate_matches():
    manifest = make_manifest(2)
    (ms,) = [m for rnd in schedule_matches(manifest) for m in rnd]
    with pytest.raises(KeyError, match="unknown match"):
        compute_standings([_result("nope", "a000", "a001", 1, 0, 0)], manifest)
    r = _result(ms.match_id, ms.agent_a, ms.agent_b, 1, 0, 0)
    with pytest.raises(ValueError, match="duplicate"):
        compute_standings([r, r], manifest)


def test_standings_forfeits_count_as_played_without_points():
    manifest = make_manifest(2)
    (ms,) = [m for rnd in schedule_matches(manifest) for m in rnd]
    table = compute_standings([], manifest, forfeited_match_ids=[ms.match_id])
    assert all(r.matches_played == 1 and r.points == 0 for r in table.rows)
