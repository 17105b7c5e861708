"""Reference semantics used to cross-check the game engines.

Nothing here builds or solves a transition game.  The engines are

* finite-path semantics and truth-swap counting on lasso paths,
* classical fixpoint labelling for one-atom coalition formulas,
* a game on (state, atom status) pairs solved stratum by stratum, and
* brute-force enumeration of positional coalition strategies.

An atom status records what the path seen so far has already settled:
an until atom becomes true when its right argument holds and false when
its left argument fails first; state atoms can only become true at the
first state and next atoms only at the second.  Anything still open when
the path is over reads as false.
"""
from __future__ import annotations

import itertools
from typing import Sequence

import networkx as nx

from .cgm import Cgm, ModelError
from .formula import (AtomKind, Coalition, Formula, Next, Not, Or, Prop, Top, Until,
                      atom_kind, evaluate_boolean, expand_abbreviations, fragment_width,
                      relative_atoms)
from .labeling import Labeling

__all__ = ["OPEN", "TRUE", "FALSE", "StatusTracker", "eval_finite_path", "tsn",
           "atl_fixpoint_label", "status_game_label", "status_game_check",
           "positional_bruteforce", "product_cycles_ok", "GuardExceeded",
           "BRUTEFORCE_LIMIT", "temporal_atom_count"]

OPEN, TRUE, FALSE = 0, 1, 2
LATER = 2

# largest number of positional strategies positional_bruteforce will try
BRUTEFORCE_LIMIT = 10 ** 6


class GuardExceeded(RuntimeError):
    pass


class StatusTracker:
    """Deterministic atom-status updates for one path formula."""

    def __init__(self, model: Cgm, path: Formula, labels: Labeling):
        self.model = model
        self.path = path
        self.atoms = relative_atoms(path)
        self.pos = {a: i for i, a in enumerate(self.atoms)}
        self.k = len(self.atoms)
        tests = []
        for a in self.atoms:
            kind = atom_kind(a)
            if kind is AtomKind.UNTIL:
                tests.append((kind, labels.true_states(a.right), labels.true_states(a.left)))
            elif kind is AtomKind.NEXT:
                tests.append((kind, labels.true_states(a.arg), None))
            else:
                tests.append((kind, labels.true_states(a), None))
        self.tests = tests
        self.initial = (OPEN,) * self.k
        self._cache = {}
        self._value = {}

    def update(self, status, q: str, step: int):
        """Status after visiting q as the ``step``-th state (0-based) of the path."""
        step = min(step, LATER)
        key = (status, q, step)
        out = self._cache.get(key)
        if out is not None:
            return out
        new = list(status)
        for i, (kind, good, left) in enumerate(self.tests):
            if new[i] != OPEN:
                continue
            if kind is AtomKind.UNTIL:
                if q in good:
                    new[i] = TRUE
                elif q not in left:
                    new[i] = FALSE
            elif kind is AtomKind.NEXT:
                if step == 1 and q in good:
                    new[i] = TRUE
            elif step == 0 and q in good:
                new[i] = TRUE
        out = tuple(new)
        self._cache[key] = out
        return out

    def value(self, status) -> bool:
        v = self._value.get(status)
        if v is None:
            v = evaluate_boolean(self.path, lambda a: status[self.pos[a]] == TRUE)
            self._value[status] = v
        return v

    def along(self, path: Sequence[str]):
        s = self.initial
        for i, q in enumerate(path):
            s = self.update(s, q, i)
        return s


def _labels_for(model, labels):
    return labels if labels is not None else Labeling(model)


def _check_path(model: Cgm, states: Sequence[str]) -> None:
    if not states:
        raise ValueError("a path needs at least one state")
    for q in states:
        if q not in model.state_index:
            raise ModelError(f"undeclared state {q!r} in path")
    for q, q2 in zip(states, states[1:]):
        if q2 not in model.successors(q):
            raise ValueError(f"{q} -> {q2} is not a transition of the model")


# --------------------------------------------------------------------------
# finite paths

def eval_finite_path(model: Cgm, path: Sequence[str], phi: Formula,
                     labels: Labeling | None = None) -> bool:
    """Truth of an (expanded) path formula on a finite path, clause by clause."""
    labels = _labels_for(model, labels)
    _check_path(model, path)
    lgt = len(path) - 1

    def ev(f):
        if isinstance(f, Not):
            return not ev(f.arg)
        if isinstance(f, Or):
            return ev(f.left) or ev(f.right)
        if isinstance(f, Next):
            return lgt >= 1 and labels.holds(f.arg, path[1])
        if isinstance(f, Until):
            for i in range(lgt + 1):
                if labels.holds(f.right, path[i]):
                    return True
                if not labels.holds(f.left, path[i]):
                    return False
            return False
        return labels.holds(f, path[0])

    return ev(phi)


def temporal_atom_count(phi: Formula) -> int:
    return sum(atom_kind(a) is not AtomKind.STATE for a in relative_atoms(phi))


def tsn(model: Cgm, lasso, phi: Formula, labels: Labeling | None = None) -> int:
    """Number of truth swaps of ``phi`` along prefix . cycle^omega.

    Swap i >= 1 compares the finite-path truth on the prefixes with i-1
    and i transitions.  Swaps need an open atom, and every atom is settled
    one cycle after the prefix, so a bounded scan is exact.
    """
    prefix, cycle = (list(x) for x in lasso)
    if not cycle:
        raise ValueError("lasso cycle must be nonempty")
    _check_path(model, prefix + cycle + cycle[:1])
    k = len(relative_atoms(phi))
    horizon = len(prefix) + (k + 1) * len(cycle) + 2

    def state(i):
        if i < len(prefix):
            return prefix[i]
        return cycle[(i - len(prefix)) % len(cycle)]

    states = [state(i) for i in range(horizon + 1)]
    labels = _labels_for(model, labels)
    values = [eval_finite_path(model, states[:i + 1], phi, labels) for i in range(horizon + 1)]
    return sum(a != b for a, b in zip(values, values[1:]))


# --------------------------------------------------------------------------
# classical labelling for one-atom coalition formulas

def _pre(model: Cgm, agents, target: set) -> set:
    return {q for q in model.states
            if any(all(s in target for s in succ) for _, succ in model.coalition_moves(q, agents))}


def atl_fixpoint_label(model: Cgm, phi: Formula) -> frozenset[str]:
    """States satisfying ``phi``, which must have fragment width at most 1."""
    phi = expand_abbreviations(phi)
    if fragment_width(phi).width > 1:
        raise ValueError("fixpoint labelling needs every coalition formula to have one atom")
    everything = frozenset(model.states)
    memo = {}

    def label(f) -> frozenset:
        if f in memo:
            return memo[f]
        if isinstance(f, Top):
            out = everything
        elif isinstance(f, Prop):
            out = frozenset(q for q in model.states if model.holds(f.name, q))
        elif isinstance(f, Not):
            out = everything - label(f.arg)
        elif isinstance(f, Or):
            out = label(f.left) | label(f.right)
        elif isinstance(f, Coalition):
            out = frozenset(coalition(f))
        else:
            raise TypeError(f"not a state formula: {f}")
        memo[f] = out
        return out

    def coalition(f: Coalition) -> set:
        (atom,) = relative_atoms(f.path)
        when_true = evaluate_boolean(f.path, lambda a: True)
        when_false = evaluate_boolean(f.path, lambda a: False)
        if when_true == when_false:
            return set(everything) if when_true else set()
        positive = when_true
        A = f.agents
        if isinstance(atom, Next):
            good = label(atom.arg) if positive else everything - label(atom.arg)
            return _pre(model, A, set(good))
        if isinstance(atom, Until):
            left, right = label(atom.left), label(atom.right)
            if positive:
                z: set = set()
                while True:
                    nz = set(right) | (set(left) & _pre(model, A, z))
                    if nz == z:
                        return z
                    z = nz
            z = set(everything)
            while True:
                nz = (everything - right) & ((everything - left) | _pre(model, A, z))
                if nz == z:
                    return z
                z = set(nz)
        # a state formula atom is settled at the first state
        return set(label(atom) if positive else everything - label(atom))

    return label(phi)


# --------------------------------------------------------------------------
# the status game

class _Product:
    """Reachable nodes (state, status, round) under all coalition choices."""

    def __init__(self, model: Cgm, agents, path: Formula, labels: Labeling):
        self.model = model
        self.agents = model.ordered(agents)
        self.tracker = StatusTracker(model, path, labels)
        self.initial = {q: (q, self.tracker.update(self.tracker.initial, q, 0), 0)
                        for q in model.states}
        self.moves = {}
        todo = list(self.initial.values())
        seen = set(todo)
        while todo:
            node = todo.pop()
            q, s, r = node
            r2 = min(r + 1, LATER)
            opts = []
            for _, succ in model.coalition_moves(q, self.agents):
                outs = tuple((q2, self.tracker.update(s, q2, r2), r2) for q2 in succ)
                opts.append(outs)
                for o in outs:
                    if o not in seen:
                        seen.add(o)
                        todo.append(o)
            self.moves[node] = opts
        self.nodes = seen


def _solve_status_game(prod: _Product) -> dict:
    win = {}
    tracker = prod.tracker
    later = {}
    for node in prod.nodes:
        if node[2] == LATER:
            later.setdefault(node[1], []).append(node)
    # settled statuses first: any status change leads to a stratum with fewer open atoms
    for status in sorted(later, key=lambda s: sum(x == OPEN for x in s)):
        stratum = later[status]
        good = tracker.value(status)
        if good:
            z = set(stratum)        # safety: stay forever or leave to a won node
            changed = True
            while changed:
                changed = False
                for node in list(z):
                    if not any(all(o in z if o[1] == status else win[o] for o in opt)
                               for opt in prod.moves[node]):
                        z.discard(node)
                        changed = True
        else:
            z = set()               # reachability of a won node in a later stratum
            changed = True
            while changed:
                changed = False
                for node in stratum:
                    if node in z:
                        continue
                    if any(all(o in z if o[1] == status else win[o] for o in opt)
                           for opt in prod.moves[node]):
                        z.add(node)
                        changed = True
        for node in stratum:
            win[node] = node in z
    for r in (1, 0):
        for node in prod.nodes:
            if node[2] == r:
                win[node] = any(all(win[o] for o in opt) for opt in prod.moves[node])
    return win


def status_game_label(model: Cgm, agents, path: Formula, labels: Labeling) -> frozenset[str]:
    """States where the coalition can force ``path`` (perfect recall)."""
    prod = _Product(model, agents, path, labels)
    win = _solve_status_game(prod)
    return frozenset(q for q in model.states if win[prod.initial[q]])


def status_game_check(model: Cgm, agents, path: Formula, labels: Labeling, q: str) -> bool:
    return q in status_game_label(model, agents, path, labels)


# --------------------------------------------------------------------------
# product cycles and positional strategies

def product_cycles_ok(start, successors, ok) -> bool:
    """True iff every node on a cycle reachable from ``start`` satisfies ``ok``."""
    g = nx.DiGraph()
    todo = list(start)
    seen = set(todo)
    g.add_nodes_from(todo)
    while todo:
        node = todo.pop()
        for nxt in successors(node):
            g.add_edge(node, nxt)
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    for comp in nx.strongly_connected_components(g):
        if len(comp) == 1:
            (v,) = comp
            if not g.has_edge(v, v):
                continue
        if not all(ok(v) for v in comp):
            return False
    return True


def positional_bruteforce(model: Cgm, agents, path: Formula, labels: Labeling, q: str,
                          limit: int = BRUTEFORCE_LIMIT) -> bool:
    """Does some memoryless coalition strategy force ``path`` from q?"""
    agents = model.ordered(agents)
    tracker = StatusTracker(model, path, labels)
    options = [model.coalition_moves(s, agents) for s in model.states]
    total = 1
    for opts in options:
        total *= len(opts)
    if total > limit:
        raise GuardExceeded(f"{total} positional strategies exceed the limit {limit}")
    idx = model.state_index
    start = (q, tracker.update(tracker.initial, q, 0), 0)
    for choice in itertools.product(*options):
        def succ(node, choice=choice):
            s, status, r = node
            r2 = min(r + 1, LATER)
            return [(s2, tracker.update(status, s2, r2), r2) for s2 in choice[idx[s]][1]]

        if product_cycles_ok([start], succ, lambda node: tracker.value(node[1])):
            return True
    return False
