import pytest

from atlplus.checker import model_check
from atlplus.formula import Prop, Top, Until, parse_formula
from atlplus.labeling import Labeling
from atlplus.oracle import (GuardExceeded, StatusTracker, atl_fixpoint_label, eval_finite_path,
                            positional_bruteforce, status_game_check, tsn)

from conftest import HUB_GOAL, M3_GOAL, PHI_STAR, expanded

M3_PATH = expanded(M3_GOAL).path


def test_prefix_with_stall_falsifies_goal(model_m3):
    assert not eval_finite_path(model_m3, ["q0"] * 5 + ["q1"], M3_PATH)


def test_single_p1_state_satisfies_goal(model_m3):
    assert eval_finite_path(model_m3, ["q0"], M3_PATH)


def test_until_on_star_prefix(model_star):
    f = expanded("<<a1>> (!p1) U p2").path
    assert eval_finite_path(model_star, ["q0", "q1", "q3"], f)


def test_path_must_follow_transitions(model_star):
    with pytest.raises(ValueError):
        eval_finite_path(model_star, ["q0", "q4"], Prop("p1"))


def test_tsn_single_swap(model_m3):
    f = Until(Top(), Prop("p2"))
    assert tsn(model_m3, (["q0", "q1"], ["q2"]), f) == 1


def test_tsn_always_true(model_m3):
    assert tsn(model_m3, ([], ["q0"]), expanded("<<a1>> G p1").path) == 0


def test_tsn_matches_long_scan(model_star):
    f = expanded("<<a1>> (F p1 & (!p1) U p2)").path
    prefix, cycle = ["q0", "q1", "q3", "q1"], ["q4"]
    states = prefix + cycle * 40
    values = [eval_finite_path(model_star, states[:i + 1], f) for i in range(len(states))]
    scanned = sum(a != b for a, b in zip(values, values[1:]))
    assert tsn(model_star, (prefix, cycle), f) == scanned <= 2


def test_fixpoint_examples(model_star, model_m3):
    assert "q0" in atl_fixpoint_label(model_star, parse_formula("<<a2>> X p1"))
    assert "q0" not in atl_fixpoint_label(model_m3, parse_formula("<<>> X p1"))
    assert "q1" in atl_fixpoint_label(model_star, parse_formula("<<a1>> F p1"))


def test_fixpoint_rejects_wide_formulas(model_m3):
    with pytest.raises(ValueError):
        atl_fixpoint_label(model_m3, parse_formula(M3_GOAL))


def test_fixpoint_negated_until(model_m3):
    # a1 can stall at q0 forever and so keep p2 away; nobody can do that alone elsewhere
    assert atl_fixpoint_label(model_m3, parse_formula("<<a1>> !(true U p2)")) == {"q0"}
    assert atl_fixpoint_label(model_m3, parse_formula("<<>> !(true U p2)")) == set()


def test_status_game_examples(model_star, model_m3):
    L = Labeling(model_m3)
    assert status_game_check(model_m3, ("a2",), M3_PATH, L, "q0")
    phi = expanded(PHI_STAR)
    labels = model_check(model_star, phi, "status-oracle").labels
    assert status_game_check(model_star, ("a1",), phi.path, labels, "q0")
    assert not status_game_check(model_m3, (), Until(Top(), Prop("p2")), L, "q0")


def test_positional_examples(model_m3, model_hub):
    assert positional_bruteforce(model_m3, ("a2",), M3_PATH, Labeling(model_m3), "q0")
    hub_path = expanded(HUB_GOAL).path
    L = Labeling(model_hub)
    assert not positional_bruteforce(model_hub, ("a",), hub_path, L, "h")
    assert status_game_check(model_hub, ("a",), hub_path, L, "h")
    assert positional_bruteforce(model_m3, ("a1", "a2"), Prop("p1"), Labeling(model_m3), "q0")


def test_positional_guard(model_m3):
    with pytest.raises(GuardExceeded):
        positional_bruteforce(model_m3, ("a2",), M3_PATH, Labeling(model_m3), "q0", limit=1)


def test_tracker_statuses_are_monotone(model_star):
    tr = StatusTracker(model_star, expanded(PHI_STAR).path,
                       model_check(model_star, parse_formula(PHI_STAR)).labels)
    s = tr.initial
    for i, q in enumerate(["q0", "q1", "q3", "q1", "q4", "q4"]):
        s2 = tr.update(s, q, i)
        assert all(a == b or a == 0 for a, b in zip(s, s2))
        s = s2
    assert tr.value(s)
