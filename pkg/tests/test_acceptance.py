"""Acceptance suite: one test per criterion, each recording a pass/fail line.

The heavy work for criteria 3, 5, 6 and 7 happens once, in the ``corpus``
fixture, which walks the 500 seeded random instances and keeps only
summary data (arenas are dropped as soon as they have been checked).
"""
import math
import random
import statistics
import time
from collections import Counter

import networkx as nx
import pytest

from atlplus.bounded import TimerPolicy, stable_timer
from atlplus.buchi import ABELARD, ELOISE, play_outcome
from atlplus.cgm import Cgm
from atlplus.checker import InstanceLimits, model_check, random_instance
from atlplus.formula import (expand_abbreviations, parse_formula, relative_atoms,
                             strategic_subformulas)
from atlplus.labeling import Labeling
from atlplus.oracle import (atl_fixpoint_label, eval_finite_path, positional_bruteforce,
                            temporal_atom_count, tsn)
from atlplus.strategy import T_ONLY, synthesize_transducer, witness

from conftest import CRITERIA, HUB_GOAL, M3_GOAL, PHI_STAR, expanded

N_INSTANCES = 500
PLAYS_PER_CLASS = 10 ** 4
ENGINES = ("buchi", "bounded", "status-oracle")


def record(n, ok, detail):
    CRITERIA[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(CRITERIA[n])


# --------------------------------------------------------------------------
# exact strategy check and simulated plays on one solved arena

def strategy_errors(arena, sol) -> int:
    """Count positions where a declared winner's strategy provably fails."""
    g = arena.graph()
    bad = 0
    for player in (ELOISE, ABELARD):
        region = sol.region(player)
        sub = nx.DiGraph()
        for v in region:
            out = [sol.strategy[v]] if g.owner[v] == player else g.succ[v]
            for w in out:
                if w not in region:
                    bad += 1
                sub.add_edge(v, w)
        if player == ELOISE:
            # no cycle of the restricted graph may touch the target
            for comp in nx.strongly_connected_components(sub):
                v = next(iter(comp))
                if (len(comp) > 1 or sub.has_edge(v, v)) and comp & g.target:
                    bad += 1
        else:
            # no cycle may avoid the target
            sub.remove_nodes_from(g.target)
            if not nx.is_directed_acyclic_graph(sub):
                bad += 1
    return bad


def simulate(arena, sol, plays, rng) -> int:
    """Random plays: the declared winner follows its strategy, the other
    player a freshly drawn positional strategy.  Returns the mismatches."""
    g = arena.graph()
    n = len(g)
    wrong = 0
    for _ in range(plays):
        start = rng.randrange(n)
        win = sol.winner[start]
        other = {}

        def choose(v):
            if g.owner[v] == win:
                return sol.strategy[v]
            if v not in other:
                other[v] = rng.choice(g.succ[v])
            return other[v]

        wrong += play_outcome(g, start, choose)[0] != win
    return wrong


@pytest.fixture(scope="module")
def corpus():
    instances = [random_instance(seed) for seed in range(N_INSTANCES)]
    # arena classes: transition games grouped by their number of relative atoms
    per_class = Counter(len(relative_atoms(c.path))
                        for _, phi in instances for c in strategic_subformulas(expand_abbreviations(phi)))
    plays_per_arena = {k: math.ceil(PLAYS_PER_CLASS / c) for k, c in per_class.items()}
    rng = random.Random(2024)
    data = {"engine_seconds": 0.0, "disagreements": [], "strategy_errors": 0,
            "plays": Counter(), "play_errors": 0, "arenas": 0, "timer_mismatch": [],
            "witnesses": Counter(), "witness_failures": [], "per_class": per_class}
    for seed, (m, phi) in enumerate(instances):
        t0 = time.perf_counter()
        verdicts = {e: model_check(m, phi, e, keep_solutions=(e == "buchi")) for e in ENGINES}
        data["engine_seconds"] += time.perf_counter() - t0
        rows = {e: v.per_state for e, v in verdicts.items()}
        if not rows["buchi"] == rows["bounded"] == rows["status-oracle"]:
            data["disagreements"].append(seed)
        doubled = model_check(m, phi, "bounded", timer=lambda f: 2 * stable_timer(m, f.path))
        if doubled.per_state != rows["bounded"]:
            data["timer_mismatch"].append(seed)
        buchi = verdicts["buchi"]
        for sub, (arena, sol) in buchi.stats.pop("solutions").items():
            data["arenas"] += 1
            data["strategy_errors"] += strategy_errors(arena, sol)
            k = arena.game.k
            plays = plays_per_arena[k]
            data["plays"][k] += plays
            data["play_errors"] += simulate(arena, sol, plays, rng)
            for q, i in arena.initial.items():
                if sol.winner[i] != ELOISE:
                    continue
                rep = synthesize_transducer(arena, sol, q)
                data["witnesses"][(rep.level, rep.verified, rep.memory <= rep.bound)] += 1
                if not rep.verified:
                    data["witness_failures"].append((seed, str(sub), q))
    return data


# --------------------------------------------------------------------------

def test_criterion_1_golden_verdicts(model_star, model_m3):
    cases = [(model_star, PHI_STAR, "q0"), (model_m3, M3_GOAL, "q0")]
    results = []
    for m, text, q in cases:
        for engine in ENGINES:
            t0 = time.perf_counter()
            v = model_check(m, parse_formula(text), engine).per_state[q]
            results.append((v, time.perf_counter() - t0))
    ok = all(v for v, _ in results) and all(s < 1.0 for _, s in results)
    record(1, ok, f"6 golden verdicts true, slowest {max(s for _, s in results):.3f}s")
    assert ok


def test_criterion_2_no_uniform_witness_depth(model_m3):
    path = expanded(M3_GOAL).path
    prefix = ["q0"] * 5 + ["q1"]
    on_prefix = eval_finite_path(model_m3, prefix, path)
    checked = model_check(model_m3, parse_formula(M3_GOAL)).per_state["q0"]
    # the same stalling trick defeats any fixed depth
    longer = all(not eval_finite_path(model_m3, ["q0"] * d + ["q1"], path) for d in range(1, 30))
    ok = (not on_prefix) and checked and longer
    record(2, ok, f"prefix q0^5 q1 -> {on_prefix}, full check at q0 -> {checked}")
    assert ok


def test_criterion_3_engine_equivalence(corpus):
    dis = corpus["disagreements"]
    secs = corpus["engine_seconds"]
    ok = not dis and secs < 300
    record(3, ok, f"{N_INSTANCES} instances, {len(dis)} disagreements, engines {secs:.1f}s")
    assert not dis, f"disagreeing seeds {dis[:10]}"
    assert secs < 300


def test_criterion_4_atl_conformance():
    lim = InstanceLimits(width=1)
    bad = []
    for seed in range(200):
        m, phi = random_instance(10 ** 5 + seed, lim)
        truth = atl_fixpoint_label(m, phi)
        got = model_check(m, phi, "buchi").per_state
        if {q for q, v in got.items() if v} != truth:
            bad.append(seed)
    record(4, not bad, f"200 width-1 instances, {len(bad)} disagreements with fixpoint labelling")
    assert not bad


def test_criterion_5_determinacy(corpus):
    plays = corpus["plays"]
    ok = (corpus["strategy_errors"] == 0 and corpus["play_errors"] == 0
          and all(plays[k] >= PLAYS_PER_CLASS for k in corpus["per_class"]))
    classes = ", ".join(f"k={k}: {plays[k]} plays" for k in sorted(plays))
    record(5, ok, f"{corpus['arenas']} arenas, {corpus['strategy_errors']} exact-check failures, "
                  f"{corpus['play_errors']} play mismatches ({classes})")
    assert ok


def test_criterion_6_timer_laws(corpus):
    mismatch = corpus["timer_mismatch"]
    lim = InstanceLimits(states=3)
    policy_bad = []
    for seed in range(50):
        m, phi = random_instance(2 * 10 ** 5 + seed, lim)
        canon = model_check(m, phi, "bounded").per_state
        exh = model_check(m, phi, "bounded", policy=TimerPolicy.EXHAUSTIVE).per_state
        if canon != exh:
            policy_bad.append(seed)
    ok = not mismatch and not policy_bad
    record(6, ok, f"stable vs doubled timer: {len(mismatch)} mismatches on {N_INSTANCES}; "
                  f"canonical-max vs exhaustive: {len(policy_bad)} mismatches on 50")
    assert ok


def test_criterion_7_memory_bound(corpus, model_hub):
    w = corpus["witnesses"]
    total = sum(w.values())
    verified = sum(c for (lvl, ver, _), c in w.items() if ver)
    t_only = sum(c for (lvl, ver, within), c in w.items() if lvl == T_ONLY and ver and within)
    fallback = total - sum(c for (lvl, _, _), c in w.items() if lvl == T_ONLY)
    f = expanded(HUB_GOAL)
    labels = Labeling(model_hub)
    positional = positional_bruteforce(model_hub, f.agents, f.path, labels, "h")
    hub_rep = witness(model_hub, labels, f.agents, f.path, "h")
    ok = (total > 0 and verified == total and t_only >= 0.95 * total
          and not positional and hub_rep.verified)
    record(7, ok, f"{total} witnesses, {verified} verified, {t_only} T-only within 3^k-2^k "
                  f"({100 * t_only / max(total, 1):.1f}%), fallback {fallback}; hub: positional "
                  f"{positional}, transducer {hub_rep.memory} cells verified {hub_rep.verified}")
    assert ok


def random_lasso(m: Cgm, rng):
    q = rng.choice(m.states)
    walk = [q]
    seen = {q: 0}
    while True:
        q = rng.choice(m.successors(q))
        if q in seen:
            i = seen[q]
            return walk[:i], walk[i:]
        seen[q] = len(walk)
        walk.append(q)


def test_criterion_8_truth_swaps():
    rng = random.Random(8)
    violations = 0
    worst = 0
    for seed in range(200):
        m, phi = random_instance(3 * 10 ** 5 + seed)
        f = expand_abbreviations(phi)
        outer = strategic_subformulas(f)[-1]
        labels = model_check(m, f, "buchi").labels
        prefix, cycle = random_lasso(m, rng)
        n = tsn(m, (prefix, cycle), outer.path, labels)
        bound = temporal_atom_count(outer.path)
        violations += n > bound
        worst = max(worst, n)
    record(8, violations == 0, f"200 lassos, {violations} violations, largest swap count {worst}")
    assert violations == 0


def chain(n: int) -> Cgm:
    """a advances (alpha) or waits (beta) along c0..c(n-1); the end loops."""
    states = [f"c{i}" for i in range(n)]
    avail = {("a", q): ("alpha", "beta") for q in states}
    trans = {}
    for i, q in enumerate(states):
        trans[(q, ("alpha",))] = states[min(i + 1, n - 1)]
        trans[(q, ("beta",))] = q
    val = {"goal": frozenset({states[-1]}), "safe": frozenset(states[:-1] + [states[-1]])}
    return Cgm(("a",), tuple(states), ("goal", "safe"), ("alpha", "beta"), avail, trans, val)


def test_criterion_9_scaling():
    phi = parse_formula("<<a>>(F goal & G safe)")
    sizes = [4, 8, 16, 32, 64]
    counts = []
    t0 = time.perf_counter()
    for n in sizes:
        v = model_check(chain(n), phi, "buchi")
        assert v.per_state["c0"]
        counts.append(v.stats["positions"])
    secs = time.perf_counter() - t0
    slope = statistics.linear_regression([math.log(n) for n in sizes],
                                         [math.log(c) for c in counts]).slope
    ok = slope <= 1.2 and secs < 30
    record(9, ok, f"positions {counts}, log-log slope {slope:.3f}, {secs:.2f}s")
    assert ok
