import pytest

from atlplus.arena import OPEN, TRUE, build_transition_arena
from atlplus.buchi import solve_buchi
from atlplus.checker import model_check
from atlplus.formula import Top
from atlplus.labeling import Labeling
from atlplus.strategy import (T_ONLY, NotWinning, Transducer, memory_bound, synthesize_transducer,
                              verify_witness, witness)

from conftest import HUB_GOAL, M3_GOAL, expanded


def m3_report(model_m3):
    f = expanded(M3_GOAL)
    return witness(model_m3, Labeling(model_m3), f.agents, f.path, "q0")


def test_memory_bound():
    assert [memory_bound(k) for k in range(1, 5)] == [1, 5, 19, 65]


def test_m3_witness(model_m3):
    rep = m3_report(model_m3)
    t = rep.transducer
    assert rep.verified and rep.level == T_ONLY
    assert rep.memory <= 5 == rep.bound
    # once the first atom (true U !p1) is true, a2 plays alpha at q1
    settled = [i for i, c in enumerate(t.cells) if c[0] == TRUE]
    assert settled and all(t.act[(i, "q1")] == ("alpha",) for i in settled if (i, "q1") in t.act)
    # every cell keeps an open atom
    assert all(OPEN in c for c in t.cells)


def test_beta_forever_fails(model_m3):
    f = expanded(M3_GOAL)
    t = Transducer(("a2",), (), "q0", [(OPEN, OPEN)], 0, {},
                   {(0, "q0"): ("alpha",), (0, "q1"): ("beta",), (0, "q2"): ("alpha",)})
    assert not verify_witness(model_m3, f.agents, f.path, Labeling(model_m3), t, "q0")


def test_any_transducer_for_true(model_m3):
    t = Transducer(("a2",), (Top(),), "q1", [(OPEN,)], 0, {}, {(0, "q1"): ("beta",)})
    assert verify_witness(model_m3, ("a2",), Top(), Labeling(model_m3), t, "q1")


def test_inadmissible_action(model_m3):
    t = Transducer(("a2",), (), "q0", [(OPEN,)], 0, {}, {(0, "q0"): ("beta",)})
    with pytest.raises(ValueError, match="inadmissible"):
        verify_witness(model_m3, ("a2",), Top(), Labeling(model_m3), t, "q0")


def test_width_one_is_positional(model_star):
    f = expanded("<<a1>> F p1")
    rep = witness(model_star, Labeling(model_star), f.agents, f.path, "q1")
    assert rep.verified and rep.memory <= 1


def test_hub_needs_memory_and_gets_it(model_hub):
    f = expanded(HUB_GOAL)
    rep = witness(model_hub, Labeling(model_hub), f.agents, f.path, "h")
    assert rep.verified and rep.level == T_ONLY
    assert 1 < rep.memory <= rep.bound


def test_not_winning(model_m3):
    f = expanded("<<a2>> F p2")
    arena = build_transition_arena(model_m3, Labeling(model_m3), f.agents, f.path)
    with pytest.raises(NotWinning):
        synthesize_transducer(arena, solve_buchi(arena.graph()), "q0")


def test_document_round_trip(model_m3):
    import yaml
    t = m3_report(model_m3).transducer
    again = Transducer.from_document(yaml.safe_load(t.dump()), t.atoms)
    assert again == t
    f = expanded(M3_GOAL)
    assert verify_witness(model_m3, f.agents, f.path, Labeling(model_m3), again, "q0")


def test_nested_witness(model_star):
    phi = expanded("<<a1>> ((!(X p3) & <<a2>> X p1) | (F p1 & (!p1) U p2))")
    labels = model_check(model_star, phi, "buchi").labels
    rep = witness(model_star, labels, phi.agents, phi.path, "q0")
    assert rep.verified and rep.memory <= memory_bound(4)
