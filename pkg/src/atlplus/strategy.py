"""Finite-memory witness strategies extracted from solved transition arenas.

The memory of a witness is a truth function over the relative atoms.  Two
readings are used:

* ``T-only``: the cell is the truth function alone.  Atoms whose only
  chance to change has passed are recorded as false instead of open (state
  atoms after the first state, next atoms after the second), so a cell
  also tells which round the play is in and the update is a function of
  (cell, observed state).
* ``T-seeker-counter``: the cell additionally holds the seeker, the seeker
  counter and the round flag.  Used only when the T-only witness does not
  verify, and always reported.

Extraction first restricts Eloise to "regular" play in the arena: she makes
every true claim herself, challenges every false claim, stops seeking as
soon as the truth function is winning for her, and takes over as soon as it
is not.  The arena is re-solved under that restriction and the coalition
profiles chosen at step positions are projected onto (cell, state) pairs,
preferring positions where Eloise is the seeker with the largest counter.

Every witness is checked by ``verify_witness``, which only uses the model
and the atom-status tracker of the oracle module.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import yaml

from .arena import (ADJUST, DECIDE, ENDING, FALSE, LATER, OPEN, SECOND, STEP, STATUS_NAMES,
                    TRUE, Arena, build_transition_arena)
from .buchi import ELOISE, GameGraph, solve_buchi
from .cgm import Cgm
from .formula import AtomKind, Formula, to_text
from .labeling import Labeling
from .oracle import StatusTracker, product_cycles_ok

__all__ = ["Transducer", "WitnessReport", "synthesize_transducer", "verify_witness",
           "memory_bound", "witness", "T_ONLY", "FULL_MEMORY", "NotWinning"]

T_ONLY = "T-only"
FULL_MEMORY = "T-seeker-counter"


class NotWinning(ValueError):
    """Eloise does not win the transition game from the requested state."""


def memory_bound(k: int) -> int:
    return 3 ** k - 2 ** k


@dataclass
class Transducer:
    agents: tuple[str, ...]
    atoms: tuple[Formula, ...]
    start: str
    cells: list                       # discovery order; cells[initial] is the first memory
    initial: int = 0
    update: dict = field(default_factory=dict)   # (cell id, observed state) -> cell id
    act: dict = field(default_factory=dict)      # (cell id, state) -> coalition profile
    level: str = T_ONLY

    @property
    def memory(self) -> int:
        return len(self.cells)

    def to_document(self) -> dict:
        def cell_doc(c):
            if self.level == T_ONLY:
                return [STATUS_NAMES[x] for x in c]
            T, seeker, n, rnd = c
            return {"truth": [STATUS_NAMES[x] for x in T], "seeker": "EA"[seeker],
                    "counter": n, "round": ("first", "second", "later")[rnd]}

        return {
            "level": self.level,
            "coalition": list(self.agents),
            "atoms": [to_text(a) for a in self.atoms],
            "start": self.start,
            "cells": [cell_doc(c) for c in self.cells],
            "initial": self.initial,
            "update": [[i, q, j] for (i, q), j in self.update.items()],
            "act": [[i, q, dict(zip(self.agents, prof))] for (i, q), prof in self.act.items()],
        }

    def dump(self) -> str:
        return yaml.safe_dump(self.to_document(), sort_keys=False, default_flow_style=None)

    @classmethod
    def from_document(cls, doc, atoms=()) -> "Transducer":
        names = {n: i for i, n in enumerate(STATUS_NAMES)}
        level = doc["level"]
        cells = []
        for c in doc["cells"]:
            if level == T_ONLY:
                cells.append(tuple(names[x] for x in c))
            else:
                cells.append((tuple(names[x] for x in c["truth"]), "EA".index(c["seeker"]),
                               c["counter"], ("first", "second", "later").index(c["round"])))
        agents = tuple(doc["coalition"])
        return cls(agents, tuple(atoms), doc["start"], cells, doc["initial"],
                   {(i, q): j for i, q, j in doc["update"]},
                   {(i, q): tuple(p[a] for a in agents) for i, q, p in doc["act"]}, level)


@dataclass
class WitnessReport:
    transducer: Transducer
    verified: bool
    memory: int
    bound: int
    level: str
    regular: bool                     # the regular restriction kept Eloise winning
    attempts: list = field(default_factory=list)


# --------------------------------------------------------------------------
# extraction

def verify_witness(model: Cgm, agents, path: Formula, labels: Labeling, t: Transducer,
                   q: str) -> bool:
    """Do all plays from q that follow ``t`` satisfy ``path``?

    Product nodes are (state, memory cell, atom status, round); a witness
    is good iff every reachable cycle carries a status making ``path`` true.
    Pairs without an ``act`` entry use the first admissible profile.
    """
    agents = model.ordered(agents)
    tracker = StatusTracker(model, path, labels)
    table = {}
    for s in model.states:
        table[s] = dict(model.coalition_moves(s, agents))
    for (c, s), prof in t.act.items():
        if tuple(prof) not in table[s]:
            raise ValueError(f"inadmissible action {prof} for {agents} at state {s}")

    def succ(node):
        s, c, status, r = node
        moves = table[s]
        prof = t.act.get((c, s))
        outs = moves[prof] if prof is not None else next(iter(moves.values()))
        r2 = min(r + 1, LATER)
        return [(s2, t.update.get((c, s2), c), tracker.update(status, s2, r2), r2) for s2 in outs]

    start = (q, t.initial, tracker.update(tracker.initial, q, 0), 0)
    return product_cycles_ok([start], succ, lambda node: tracker.value(node[2]))


class _Extractor:
    def __init__(self, arena: Arena, solution):
        self.arena = arena
        self.game = arena.game
        if self.game.verifier != ELOISE:
            raise ValueError("witnesses are extracted for transition games verified by Eloise")
        self.solution = solution
        self.regular = False
        self.sigma = solution.strategy
        self.winner = solution.winner

    # -- regular restriction ------------------------------------------------
    def regular_choice(self, i):
        """The edge a regular Eloise takes at position i, or None if free."""
        g = self.game
        pos = self.arena.positions[i]
        if pos[0] == ENDING or self.arena.owner[i] != ELOISE:
            return None
        seeker, q, T, n, rnd, phase, index, stage = pos
        labels = self.arena.labels[i]
        if phase == ADJUST:
            truth = g.ver_true[index][q] if stage < 4 else g.fal_true[index][q]
            if stage in (0, 4):
                want = "claim" if truth else "pass"
            else:
                want = "accept" if truth else "challenge"
        elif phase == DECIDE:
            good = g.phi_true(T)
            if index == 0:
                want = "stop" if good else "continue"
            else:
                want = "end" if good else "takeover"
        else:
            return None
        return self.arena.succ[i][labels.index(want)]

    def regularize(self, start: int) -> None:
        arena = self.arena
        succ = []
        for i in range(len(arena)):
            forced = self.regular_choice(i)
            succ.append([forced] if forced is not None else arena.succ[i])
        sol = solve_buchi(GameGraph(arena.owner, succ, arena.target))
        if sol.winner[start] == ELOISE:
            self.regular = True
            self.sigma = sol.strategy
            self.winner = sol.winner

    # -- Abelard's stand-in behaviour ---------------------------------------
    def abelard_choice(self, i):
        """Abelard claims what is true, challenges what is false, and seeks
        exactly while the truth function is winning for Eloise."""
        g = self.game
        seeker, q, T, n, rnd, phase, index, stage = self.arena.positions[i]
        labels = self.arena.labels[i]
        if phase == ADJUST:
            truth = g.ver_true[index][q] if stage < 4 else g.fal_true[index][q]
            if stage in (2, 6):
                want = "claim" if truth else "pass"
            else:
                want = "accept" if truth else "challenge"
        else:
            good = g.phi_true(T)
            if index == 0:
                want = "continue" if good else "stop"
            else:
                want = "takeover" if good else "end"
        return self.arena.succ[i][labels.index(want)]

    def advance(self, i):
        """Follow both players' fixed choices to the next step or ending position."""
        arena = self.arena
        while True:
            pos = arena.positions[i]
            if pos[0] == ENDING:
                return i
            if pos[5] == STEP and pos[6] == 0:
                return i
            if arena.owner[i] == ELOISE:
                i = self.sigma[i]
            else:
                i = self.abelard_choice(i)

    # -- simulation with full memory ----------------------------------------
    def simulate(self, start: int):
        """Step positions reached by the stand-in play, with their transitions."""
        arena = self.arena
        first = self.advance(start)
        order = [first]
        seen = {first}
        edges = {}
        queue = deque([first])
        while queue:
            i = queue.popleft()
            if arena.positions[i][0] == ENDING:
                if arena.positions[i][1] != ELOISE:
                    raise RuntimeError("Eloise's strategy lost against the stand-in play")
                continue
            f = self.sigma[i]
            for lab, child in zip(arena.labels[f], arena.succ[f]):
                j = self.advance(child)
                edges[(i, lab[3:])] = j
                if j not in seen:
                    seen.add(j)
                    order.append(j)
                    queue.append(j)
        return order, edges

    def profile_at(self, i):
        pos = self.arena.positions[i]
        f = self.sigma[i]
        return self.game.moves[pos[1]][self.arena.positions[f][7]][0]

    def full_memory(self, start: int, from_state: str) -> Transducer:
        arena = self.arena
        order, edges = self.simulate(start)
        cells, cell_id = [], {}
        act, update = {}, {}
        states = self.game.model.states

        def cid(i):
            seeker, q, T, n, rnd = arena.positions[i][:5]
            key = (T, seeker, n, rnd)
            if key not in cell_id:
                cell_id[key] = len(cells)
                cells.append(key)
            return cell_id[key]

        for i in order:
            if arena.positions[i][0] == ENDING:
                continue
            c = cid(i)
            act[(c, states[arena.positions[i][1]])] = self.profile_at(i)
        for (i, q2), j in edges.items():
            if arena.positions[j][0] == ENDING:
                continue
            update[(cid(i), q2)] = cid(j)
        return Transducer(self.game.agents, self.game.atoms, from_state, cells, 0,
                          update, act, FULL_MEMORY)

    # -- truth-function memory ----------------------------------------------
    def normalize(self, T, rnd):
        kinds = self.game.kinds
        out = list(T)
        for i, kind in enumerate(kinds):
            if out[i] == OPEN and (kind is AtomKind.STATE or (kind is AtomKind.NEXT and rnd >= SECOND)):
                out[i] = FALSE
        return tuple(out)

    def cell_update(self, cell, q: int):
        """Truth function after truthful claims at q, following ``cell``."""
        g = self.game
        second = any(c == OPEN and kind is AtomKind.NEXT for c, kind in zip(cell, g.kinds))
        out = list(cell)
        for i, kind in enumerate(g.kinds):
            if out[i] != OPEN:
                continue
            if kind is AtomKind.UNTIL:
                if g.ver_true[i][q]:
                    out[i] = TRUE
                elif g.fal_true[i][q]:
                    out[i] = FALSE
            elif kind is AtomKind.NEXT and second:
                out[i] = TRUE if g.ver_true[i][q] else FALSE
        return tuple(out)

    def initial_cell(self, q: int):
        g = self.game
        out = []
        for i, kind in enumerate(g.kinds):
            if kind is AtomKind.STATE:
                out.append(TRUE if g.ver_true[i][q] else FALSE)
            elif kind is AtomKind.NEXT:
                out.append(OPEN)
            elif g.ver_true[i][q]:
                out.append(TRUE)
            elif g.fal_true[i][q]:
                out.append(FALSE)
            else:
                out.append(OPEN)
        return tuple(out)

    def candidates(self, visited):
        """Step positions won by Eloise, grouped by (cell, state)."""
        groups = {}
        arena = self.arena
        for i, pos in enumerate(arena.positions):
            if pos[0] == ENDING or pos[5] != STEP or pos[6] != 0 or self.winner[i] != ELOISE:
                continue
            seeker, q, T, n, rnd = pos[:5]
            groups.setdefault((self.normalize(T, rnd), q), []).append(i)
        return groups

    def t_only(self, from_state: str, groups, rank) -> Transducer:
        model = self.game.model
        q0 = model.state_index[from_state]
        init = self.initial_cell(q0)
        cells, cell_id = [init], {init: 0}
        act, update = {}, {}
        queue = deque([(init, q0)])
        seen = {(init, q0)}
        while queue:
            cell, q = queue.popleft()
            c = cell_id[cell]
            options = groups.get((cell, q))
            if options:
                best = min(options, key=rank)
                prof = self.profile_at(best)
                act[(c, model.states[q])] = prof
                succ = dict(self.game.moves[q])[prof]
            else:
                succ = self.game.moves[q][0][1]
            for q2 in succ:
                nxt = self.cell_update(cell, q2)
                if OPEN in nxt:
                    if nxt not in cell_id:
                        cell_id[nxt] = len(cells)
                        cells.append(nxt)
                    update[(c, model.states[q2])] = cell_id[nxt]
                else:
                    nxt = cell          # fully settled: memory stays where it is
                if (nxt, q2) not in seen:
                    seen.add((nxt, q2))
                    queue.append((nxt, q2))
        return Transducer(self.game.agents, self.game.atoms, from_state, cells, 0,
                          update, act, T_ONLY)


def synthesize_transducer(arena: Arena, solution, from_state: str) -> WitnessReport:
    """Bounded-memory witness for Eloise's win of the arena's game at ``from_state``."""
    start = arena.initial[from_state]
    if solution.winner[start] != ELOISE:
        raise NotWinning(f"Eloise does not win the transition game at {from_state}")
    ex = _Extractor(arena, solution)
    ex.regularize(start)
    game = arena.game
    k = game.k
    bound = memory_bound(k)
    check = lambda t: verify_witness(game.model, game.agents, game.path, game.labels, t,
                                     from_state)
    groups = ex.candidates(None)
    pos = arena.positions
    preferences = [
        # Eloise seeking first, largest counter, latest round
        lambda i: (pos[i][0] != ELOISE, -pos[i][3], -pos[i][4], i),
        lambda i: (pos[i][0] != ELOISE, pos[i][3], -pos[i][4], i),
        lambda i: (pos[i][0] == ELOISE, -pos[i][3], -pos[i][4], i),
    ]
    attempts = []
    for rank in preferences:
        t = ex.t_only(from_state, groups, rank)
        ok = check(t)
        attempts.append((T_ONLY, ok))
        if ok:
            return WitnessReport(t, True, t.memory, bound, T_ONLY, ex.regular, attempts)
    t = ex.full_memory(start, from_state)
    ok = check(t)
    attempts.append((FULL_MEMORY, ok))
    return WitnessReport(t, ok, t.memory, bound, FULL_MEMORY, ex.regular, attempts)


def witness(model: Cgm, labels: Labeling, agents, path: Formula, from_state: str) -> WitnessReport:
    """Build and solve the arena for <<agents>>path, then extract a witness."""
    arena = build_transition_arena(model, labels, agents, path)
    sol = solve_buchi(arena.graph())
    return synthesize_transducer(arena, sol, from_state)
