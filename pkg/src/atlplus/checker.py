"""Model checking by bottom-up labelling, engine cross-validation and random instances."""
from __future__ import annotations

import hashlib
import itertools
import random
import time
from dataclasses import dataclass, field

from .arena import build_transition_arena
from .bounded import BoundedSolver, TimerPolicy
from .buchi import ELOISE, solve_buchi
from .cgm import Cgm, dump_model, load_model, model_to_dict
from .formula import (And, Always, Coalition, Eventually, Formula, Implies, Next, Not, Or,
                      Prop, Release, Top, Until, expand_abbreviations, is_state, fragment_width,
                      strategic_subformulas, to_text)
from .labeling import Labeling
from .oracle import atl_fixpoint_label, status_game_label

__all__ = ["ENGINES", "Verdict", "AgreementReport", "model_check", "default_engine",
           "cross_validate", "random_instance", "InstanceLimits", "shrink_instance",
           "instance_digest"]

ENGINES = ("buchi", "bounded", "status-oracle")


@dataclass
class Verdict:
    formula: str
    per_state: dict[str, bool]
    engine: str
    stats: dict = field(default_factory=dict)
    labels: Labeling | None = field(default=None, repr=False)

    def true_states(self) -> list[str]:
        return [q for q, v in self.per_state.items() if v]

    def to_document(self, timings: bool = False) -> dict:
        stats = dict(self.stats)
        if not timings:
            stats.pop("seconds", None)
        return {"formula": self.formula, "per_state": dict(self.per_state),
                "engine": self.engine, "stats": stats}


def default_engine(phi: Formula) -> str:
    return "buchi" if fragment_width(phi).width <= 4 else "bounded"


def model_check(model: Cgm, phi: Formula, engine: str | None = None, *, timer=None,
                policy: TimerPolicy | str = TimerPolicy.CANONICAL_MAX,
                solver: BoundedSolver | None = None, keep_solutions: bool = False) -> Verdict:
    """Truth of ``phi`` at every state of ``model``.

    Coalition subformulas are labelled innermost first.  The bounded engine
    instead searches each state's evaluation game directly (it handles
    nesting itself), with the memo table shared across states.
    """
    f = expand_abbreviations(phi)
    engine = engine or default_engine(f)
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; choose from {', '.join(ENGINES)}")
    started = time.perf_counter()
    labels = Labeling(model)
    stats: dict = {"width": fragment_width(f).width}
    if engine == "bounded":
        solver = solver or BoundedSolver(model, timer, policy, memoize=True)
        per_state = {q: solver.wins(f, q) for q in model.states}
        stats["positions"] = len(solver.memo)
    else:
        positions = 0
        solutions = {}
        for sub in strategic_subformulas(f):
            if engine == "buchi":
                arena = build_transition_arena(model, labels, sub.agents, sub.path)
                sol = solve_buchi(arena.graph())
                positions += len(arena)
                won = {q for q, i in arena.initial.items() if sol.winner[i] == ELOISE}
                if keep_solutions:
                    solutions[sub] = (arena, sol)
            else:
                won = status_game_label(model, sub.agents, sub.path, labels)
            labels.set(sub, won)
        per_state = {q: labels.holds(f, q) for q in model.states}
        if engine == "buchi":
            stats["positions"] = positions
        if keep_solutions:
            stats["solutions"] = solutions
    stats["seconds"] = time.perf_counter() - started
    return Verdict(to_text(f), per_state, engine, stats, labels)


# --------------------------------------------------------------------------
# cross validation

def instance_digest(model: Cgm, phi: Formula) -> str:
    h = hashlib.sha256()
    h.update(dump_model(model).encode())
    h.update(b"\0")
    h.update(to_text(expand_abbreviations(phi)).encode())
    return h.hexdigest()[:16]


@dataclass
class AgreementReport:
    digest: str
    formula: str
    matrix: dict[str, dict[str, bool]]
    disagreements: list[dict]

    @property
    def agree(self) -> bool:
        return not self.disagreements

    def to_document(self) -> dict:
        return {"instance": self.digest, "formula": self.formula,
                "engines": {e: dict(v) for e, v in self.matrix.items()},
                "disagreements": list(self.disagreements)}


def _matrix(model, f, engines):
    matrix = {}
    for e in engines:
        matrix[e] = model_check(model, f, e).per_state
    if fragment_width(f).width <= 1:
        true = atl_fixpoint_label(model, f)
        matrix["fixpoint"] = {q: q in true for q in model.states}
    return matrix


def _disagreements(model, matrix):
    out = []
    for q in model.states:
        row = {e: v[q] for e, v in matrix.items()}
        if len(set(row.values())) > 1:
            out.append({"state": q, "verdicts": row})
    return out


def cross_validate(model: Cgm, phi: Formula, engines=ENGINES, shrink: bool = True) -> AgreementReport:
    """Run every engine (plus fixpoint labelling for width <= 1) at every state."""
    f = expand_abbreviations(phi)
    matrix = _matrix(model, f, engines)
    dis = _disagreements(model, matrix)
    report = AgreementReport(instance_digest(model, f), to_text(f), matrix, dis)
    if dis and shrink:
        def failing(m, g):
            try:
                return bool(_disagreements(m, _matrix(m, g, engines)))
            except Exception:
                return False

        m2, f2 = shrink_instance(model, f, failing)
        report.disagreements.append({"reproducer": {"model": model_to_dict(m2),
                                                    "formula": to_text(f2)}})
    return report


# --------------------------------------------------------------------------
# shrinking

def _formula_candidates(f: Formula):
    """Smaller formulas: a child in place of a node, or a leaf in place of a subtree."""
    if isinstance(f, (Top, Prop)):
        return
    if not isinstance(f, Coalition) and not isinstance(f, (Next, Until)):
        yield Top()
    for c in f.children():
        if isinstance(f, Coalition) or not isinstance(f, (Next, Until)):
            yield c
    if isinstance(f, Coalition) and f.agents:
        for a in f.agents:
            yield Coalition(tuple(x for x in f.agents if x != a), f.path)
    kids = f.children()
    for i, c in enumerate(kids):
        for c2 in _formula_candidates(c):
            new = list(kids)
            new[i] = c2
            try:
                yield _rebuild(f, new)
            except ValueError:
                continue


def _rebuild(f, kids):
    if isinstance(f, Coalition):
        return Coalition(f.agents, kids[0])
    return type(f)(*kids)


def _well_shaped(f: Formula) -> bool:
    if isinstance(f, (Next, Until)) and not all(is_state(c) for c in f.children()):
        return False
    return all(_well_shaped(c) for c in f.children())


def _drop_state(model: Cgm, victim: str) -> Cgm | None:
    if len(model.states) == 1:
        return None
    doc = model_to_dict(model)
    keep = [q for q in model.states if q != victim]
    doc["states"] = keep
    doc["available"] = [e for e in doc["available"] if e["state"] != victim]
    doc["transitions"] = [dict(e, to=keep[0] if e["to"] == victim else e["to"])
                          for e in doc["transitions"] if e["from"] != victim]
    doc["valuation"] = {p: [q for q in qs if q != victim] for p, qs in doc["valuation"].items()}
    return load_model(doc)


def shrink_instance(model: Cgm, f: Formula, failing, rounds: int = 200):
    """Greedy delta debugging: keep any smaller instance that still fails."""
    for _ in range(rounds):
        progress = False
        for q in model.states:
            m2 = _drop_state(model, q)
            if m2 is not None and failing(m2, f):
                model, progress = m2, True
                break
        if progress:
            continue
        for g in _formula_candidates(f):
            if is_state(g) and _well_shaped(g) and failing(model, g):
                f, progress = g, True
                break
        if not progress:
            break
    return model, f


# --------------------------------------------------------------------------
# random instances

@dataclass(frozen=True)
class InstanceLimits:
    states: int = 6
    agents: int = 3
    actions: int = 2
    width: int = 3
    depth: int = 3
    propositions: int = 2


def _random_model(rng: random.Random, lim: InstanceLimits) -> Cgm:
    n_states = rng.randint(1, lim.states)
    n_agents = rng.randint(1, lim.agents)
    states = [f"s{i}" for i in range(n_states)]
    agents = [f"a{i + 1}" for i in range(n_agents)]
    actions = [f"x{i}" for i in range(lim.actions)]
    props = [f"p{i + 1}" for i in range(lim.propositions)]
    available = []
    d = {}
    for q in states:
        for a in agents:
            acts = actions[:rng.randint(1, lim.actions)]
            d[(a, q)] = acts
            available.append({"agent": a, "state": q, "actions": acts})
    transitions = []
    for q in states:
        for prof in itertools.product(*(d[(a, q)] for a in agents)):
            transitions.append({"from": q, "profile": dict(zip(agents, prof)),
                                "to": rng.choice(states)})
    valuation = {p: [q for q in states if rng.random() < 0.5] for p in props}
    doc = {"agents": agents, "states": states, "propositions": props, "actions": actions,
           "available": available, "transitions": transitions, "valuation": valuation}
    # round trip through the document loader, which validates everything
    return load_model(dump_model(load_model(doc)))


def _random_state(rng, props, agents, depth, width, budget=2) -> Formula:
    """A state formula with coalition nesting depth at most ``depth``."""
    r = rng.random()
    if depth > 0 and r < 0.45:
        return _random_coalition(rng, props, agents, depth, width)
    if budget > 0 and r < 0.6:
        return Not(_random_state(rng, props, agents, depth, width, budget - 1))
    if budget > 0 and r < 0.7:
        op = rng.choice((Or, And))
        return op(_random_state(rng, props, agents, depth, width, budget - 1),
                  _random_state(rng, props, agents, depth, width, budget - 1))
    if r < 0.75:
        return Top()
    return Prop(rng.choice(props))


def _random_atomic(rng, props, agents, depth, width) -> Formula:
    # a single state atom: proposition, true, or a coalition formula
    r = rng.random()
    if depth > 0 and r < 0.4:
        return _random_coalition(rng, props, agents, depth, width)
    return Top() if rng.random() < 0.1 else Prop(rng.choice(props))


def _random_coalition(rng, props, agents, depth, width) -> Coalition:
    k = rng.randint(1, width)
    A = tuple(a for a in agents if rng.random() < 0.5)
    inner = lambda: _random_state(rng, props, agents, depth - 1, width, budget=1)
    leaves = []
    for _ in range(k):
        kind = rng.random()
        if kind < 0.2:
            leaves.append(_random_atomic(rng, props, agents, depth - 1, width))
        elif kind < 0.4:
            leaves.append(Next(inner()))
        elif kind < 0.6:
            leaves.append(Eventually(inner()))
        elif kind < 0.75:
            leaves.append(Always(inner()))
        elif kind < 0.9:
            leaves.append(Until(inner(), inner()))
        else:
            leaves.append(Release(inner(), inner()))
    while len(leaves) > 1:
        i = rng.randrange(len(leaves) - 1)
        op = rng.choice((Or, And, And, Implies))
        leaves[i:i + 2] = [op(leaves[i], leaves[i + 1])]
    path = leaves[0]
    if rng.random() < 0.3:
        path = Not(path)
    return Coalition(A, path)


def random_instance(seed: int, limits: InstanceLimits | None = None):
    """Deterministic (model, formula) pair; the formula is a coalition formula."""
    lim = limits or InstanceLimits()
    rng = random.Random(seed)
    model = _random_model(rng, lim)
    depth = rng.randint(1, lim.depth)
    phi = _random_coalition(rng, list(model.propositions), list(model.agents), depth, lim.width)
    if rng.random() < 0.3:
        phi = rng.choice((Not(phi), Or(Prop(model.propositions[0]), phi)))
    return model, phi
