import pytest

from atlplus.arena import (ADJUST, DECIDE, ENDING, FALSE, FIRST, OPEN, SECOND, STEP, TRUE,
                           TransitionGame, build_transition_arena, parse_dump)
from atlplus.buchi import ABELARD, ELOISE, solve_buchi
from atlplus.checker import model_check
from atlplus.formula import Prop
from atlplus.labeling import Labeling, MissingLabel

from conftest import M3_GOAL, PHI_STAR, expanded


@pytest.fixture
def star_game(model_star):
    phi = expanded(PHI_STAR)
    labels = model_check(model_star, phi, "buchi").labels
    return TransitionGame(model_star, labels, phi.agents, phi.path)


def test_initial_configuration(star_game):
    # seeker Eloise, state q0, everything open, counter 4, first round, adjust on atom 0
    # (X p3 is a next atom, so the first eligible atom in round one is <<a2>>X p1)
    assert star_game.initial(0) == (ELOISE, 0, (OPEN,) * 4, 4, FIRST, ADJUST, 1, 0)


def test_abelard_verifies_next_atom(star_game):
    # Abelard offers to verify X p3 by claiming p3 at q1; acceptance makes it true
    pos = (ABELARD, 1, (OPEN,) * 4, 3, SECOND, ADJUST, 0, 2)
    assert star_game.owner(pos) == ABELARD
    moves = dict(star_game.enumerate_moves(pos))
    claimed = moves["claim"]
    assert star_game.owner(claimed) == ELOISE
    accepted = dict(star_game.enumerate_moves(claimed))["accept"]
    assert accepted[2][0] == TRUE


def test_false_claim_is_punished(star_game):
    # Abelard claims p3 at q2 (false there); Eloise challenges and wins
    pos = (ABELARD, 2, (OPEN,) * 4, 3, SECOND, ADJUST, 0, 2)
    claimed = dict(star_game.enumerate_moves(pos))["claim"]
    assert dict(star_game.enumerate_moves(claimed))["challenge"] == (ENDING, ELOISE)


def test_seeker_stops_with_zero_counter(star_game):
    T = (OPEN,) * 4
    pos = (ABELARD, 0, T, 0, SECOND, DECIDE, 0, 0)
    moves = dict(star_game.enumerate_moves(pos))
    assert moves["stop"] == star_game.boolean_exit(T)
    assert moves["continue"][5] == STEP


def test_settled_until_atom_has_no_stages(star_game):
    T = (OPEN, OPEN, TRUE, OPEN)
    pos = star_game.enter_adjust(ELOISE, 0, T, 4, SECOND, 2)
    assert pos[5] == ADJUST and pos[6] == 3


def test_boolean_exit_left_disjunct(star_game):
    assert star_game.boolean_exit((OPEN, TRUE, OPEN, OPEN)) == (ENDING, ELOISE)
    assert star_game.boolean_exit((TRUE, TRUE, OPEN, OPEN)) == (ENDING, ABELARD)


def test_boolean_exit_open_reads_false(model_m3):
    f = expanded("<<a1>> G !p")   # path = !(true U !!p)
    game = TransitionGame(model_m3, Labeling(model_m3), f.agents, f.path)
    assert game.boolean_exit((OPEN,)) == (ENDING, ELOISE)


def test_m3_arena_size_regression(model_m3):
    f = expanded(M3_GOAL)
    arena = build_transition_arena(model_m3, Labeling(model_m3), f.agents, f.path)
    truths = {p[2] for p in arena.positions if p[0] != ENDING}
    assert len(truths) <= 9
    assert len(arena) == 1619 < 3000


def test_state_atom_only_in_first_round(model_m3):
    arena = build_transition_arena(model_m3, Labeling(model_m3), ("a1",), Prop("p1"))
    for pos in arena.positions:
        if pos[0] != ENDING and pos[5] == ADJUST:
            assert pos[4] == FIRST


def test_arena_invariants(model_star):
    phi = expanded(PHI_STAR)
    labels = model_check(model_star, phi, "buchi").labels
    arena = build_transition_arena(model_star, labels, phi.agents, phi.path)
    game = arena.game
    for i, pos in enumerate(arena.positions):
        out = arena.succ[i]
        assert out
        if pos[0] == ENDING:
            assert out == [i]
            continue
        seeker, q, T, n, rnd, phase, index, stage = pos
        assert 0 <= n <= game.k
        if phase == ADJUST:
            assert game.eligible(index, T, rnd)
            if stage >= 4:
                assert game.kinds[index].name == "UNTIL"
        for j in out:
            nxt = arena.positions[j]
            if nxt[0] == ENDING:
                continue
            # truth functions only move from open to settled
            assert all(a == b or a == OPEN for a, b in zip(T, nxt[2]))
            if nxt[0] != seeker:
                assert nxt[3] == n - 1


def test_missing_label_is_reported(model_star):
    phi = expanded(PHI_STAR)
    with pytest.raises(MissingLabel, match="a2"):
        build_transition_arena(model_star, Labeling(model_star), phi.agents, phi.path)


def test_dump_round_trip(model_m3):
    f = expanded(M3_GOAL)
    arena = build_transition_arena(model_m3, Labeling(model_m3), f.agents, f.path)
    text = arena.dump()
    assert "# edges" in text and "# buchi" in text
    g = parse_dump(text)
    assert g.succ == arena.succ and g.target == arena.target and g.owner == arena.owner
    assert solve_buchi(g).winner == solve_buchi(arena.graph()).winner


def test_pruned_claims_keep_winners(model_star):
    phi = expanded(PHI_STAR)
    labels = model_check(model_star, phi, "buchi").labels
    full = build_transition_arena(model_star, labels, phi.agents, phi.path)
    pruned = build_transition_arena(model_star, labels, phi.agents, phi.path, prune_claims=True)
    assert len(pruned) <= len(full)
    w_full = solve_buchi(full.graph()).winner
    w_pruned = solve_buchi(pruned.graph()).winner
    for q in model_star.states:
        assert w_full[full.initial[q]] == w_pruned[pruned.initial[q]]


def test_false_status_encoding():
    from atlplus.arena import decode_truth, encode_truth
    assert encode_truth((OPEN, TRUE, FALSE)) == "otf"
    assert decode_truth("otf") == (OPEN, TRUE, FALSE)
