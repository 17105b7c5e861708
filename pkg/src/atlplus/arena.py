"""Explicit position graph of one unbounded transition game <<A>>Phi.

A configuration is the tuple ``(seeker, q, T, n, round, phase, index, stage)``
with states as indices into ``model.states`` and ``T`` a tuple of atom
statuses.  Its meaning by phase:

* ADJUST: ``index`` is the atom under consideration, ``stage`` one of the
  eight claim stages (``ADJUST_STAGES``).  Only atoms that can still change
  get stages at all; the others are skipped.
* DECIDE: ``index`` 0 is the seeker's continue/stop choice, 1 the
  opponent's takeover/end choice.
* STEP: ``index`` 0 is the verifier choosing a coalition profile, 1 the
  falsifier choosing the successor; ``stage`` is then the profile number.

Exits are resolved immediately against precomputed labels, so the graph
has exactly two terminal positions, one won by each player.  Abelard gets
the Büchi objective: the target set holds every configuration where
Eloise is the seeker, plus the ending won by Abelard.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .buchi import ABELARD, ELOISE, GameGraph
from .cgm import Cgm, format_profile
from .formula import (AtomKind, Formula, Not, Until, atom_kind, evaluate_boolean,
                      relative_atoms)
from .labeling import Labeling

__all__ = ["OPEN", "TRUE", "FALSE", "STATUS_CHARS", "ADJUST", "DECIDE", "STEP",
           "FIRST", "SECOND", "LATER", "ADJUST_STAGES", "Arena", "TransitionGame",
           "build_transition_arena", "parse_dump", "encode_truth", "decode_truth"]

OPEN, TRUE, FALSE = 0, 1, 2
STATUS_CHARS = "otf"
STATUS_NAMES = ("open", "true", "false")
ADJUST, DECIDE, STEP = 0, 1, 2
FIRST, SECOND, LATER = 0, 1, 2
ROUND_NAMES = ("first", "second", "later")
ADJUST_STAGES = ("V-offer-ver", "Vbar-respond-ver", "Vbar-offer-ver", "V-respond-ver",
                 "V-offer-fal", "Vbar-respond-fal", "Vbar-offer-fal", "V-respond-fal")
# which side owns each adjust stage: True for the verifier V
_STAGE_IS_V = (True, False, False, True, True, False, False, True)
ENDING = "end"


def encode_truth(T) -> str:
    return "".join(STATUS_CHARS[x] for x in T)


def decode_truth(s: str) -> tuple[int, ...]:
    return tuple(STATUS_CHARS.index(c) for c in s)


class TransitionGame:
    """Rule book of one transition game; shared by the arena and the strategy code."""

    def __init__(self, model: Cgm, labels: Labeling, agents, path: Formula,
                 verifier: int = ELOISE, prune_claims: bool = False):
        self.model = model
        self.labels = labels
        self.agents = model.ordered(agents)
        self.path = path
        self.verifier = verifier
        self.prune_claims = prune_claims
        self.atoms = relative_atoms(path)
        self.kinds = [atom_kind(a) for a in self.atoms]
        self.k = len(self.atoms)
        self.atom_pos = {a: i for i, a in enumerate(self.atoms)}
        states = model.states
        # claim formulas and their truth at each state
        self.ver_claim = []
        self.fal_claim = []
        for a in self.atoms:
            if isinstance(a, Until):
                self.ver_claim.append(a.right)
                self.fal_claim.append(Not(a.left))
            elif atom_kind(a) is AtomKind.NEXT:
                self.ver_claim.append(a.arg)
                self.fal_claim.append(None)
            else:
                self.ver_claim.append(a)
                self.fal_claim.append(None)
        self.ver_true = [[labels.holds(f, q) for q in states] for f in self.ver_claim]
        self.fal_true = [[f is not None and labels.holds(f, q) for q in states]
                         for f in self.fal_claim]
        self.moves = []
        for q in states:
            self.moves.append([(prof, tuple(model.state_index[s] for s in succ))
                               for prof, succ in model.coalition_moves(q, self.agents)])
        self._phi = {}

    # -- helpers -----------------------------------------------------------
    def phi_true(self, T) -> bool:
        """Truth of Phi under T with open read as false."""
        v = self._phi.get(T)
        if v is None:
            v = evaluate_boolean(self.path, lambda a: T[self.atom_pos[a]] == TRUE)
            self._phi[T] = v
        return v

    def eligible(self, i, T, rnd) -> bool:
        if T[i] != OPEN:
            return False
        kind = self.kinds[i]
        if kind is AtomKind.UNTIL:
            return True
        if kind is AtomKind.NEXT:
            return rnd == SECOND
        return rnd == FIRST

    def enter_adjust(self, seeker, q, T, n, rnd, start=0):
        for i in range(start, self.k):
            if self.eligible(i, T, rnd):
                return (seeker, q, T, n, rnd, ADJUST, i, 0)
        return (seeker, q, T, n, rnd, DECIDE, 0, 0)

    def initial(self, q: int):
        return self.enter_adjust(self.verifier, q, (OPEN,) * self.k, self.k, FIRST)

    def boolean_exit(self, T):
        return (ENDING, self.verifier if self.phi_true(T) else 1 - self.verifier)

    def owner(self, pos) -> int:
        if pos[0] == ENDING:
            return pos[1]
        seeker, _, _, _, _, phase, index, stage = pos
        V = self.verifier
        if phase == ADJUST:
            return V if _STAGE_IS_V[stage] else 1 - V
        if phase == DECIDE:
            return seeker if index == 0 else 1 - seeker
        return V if index == 0 else 1 - V

    # -- rules -------------------------------------------------------------
    def enumerate_moves(self, pos):
        """Rule-determined successors as ``(label, position)`` pairs."""
        if pos[0] == ENDING:
            return [("loop", pos)]
        seeker, q, T, n, rnd, phase, index, stage = pos
        V = self.verifier
        Vbar = 1 - V
        if phase == ADJUST:
            i = index
            after = lambda T2: self.enter_adjust(seeker, q, T2, n, rnd, i + 1)
            here = lambda s: (seeker, q, T, n, rnd, ADJUST, i, s)
            set_to = lambda val: T[:i] + (val,) + T[i + 1:]
            ver = self.ver_true[i][q]
            fal = self.fal_true[i][q]
            until = self.kinds[i] is AtomKind.UNTIL
            prune = self.prune_claims
            if stage == 0:
                moves = [("pass", here(2))]
                if ver or not prune:
                    moves.insert(0, ("claim", here(1)))
                return moves
            if stage == 1:
                moves = [("accept", after(set_to(TRUE)))]
                if not (prune and ver):
                    moves.append(("challenge", (ENDING, V if ver else Vbar)))
                return moves
            if stage == 2:
                moves = [("pass", here(4) if until else after(T))]
                if ver or not prune:
                    moves.insert(0, ("claim", here(3)))
                return moves
            if stage == 3:
                moves = [("accept", after(set_to(TRUE)))]
                if not (prune and ver):
                    moves.append(("challenge", (ENDING, Vbar if ver else V)))
                return moves
            if stage == 4:
                moves = [("pass", here(6))]
                if fal or not prune:
                    moves.insert(0, ("claim", here(5)))
                return moves
            if stage == 5:
                moves = [("accept", after(set_to(FALSE)))]
                if not (prune and fal):
                    moves.append(("challenge", (ENDING, V if fal else Vbar)))
                return moves
            if stage == 6:
                moves = [("pass", after(T))]
                if fal or not prune:
                    moves.insert(0, ("claim", here(7)))
                return moves
            moves = [("accept", after(set_to(FALSE)))]
            if not (prune and fal):
                moves.append(("challenge", (ENDING, Vbar if fal else V)))
            return moves
        if phase == DECIDE:
            if index == 0:
                stop = (seeker, q, T, n, rnd, DECIDE, 1, 0) if n > 0 else self.boolean_exit(T)
                return [("continue", (seeker, q, T, n, rnd, STEP, 0, 0)), ("stop", stop)]
            return [("takeover", (1 - seeker, q, T, n - 1, rnd, STEP, 0, 0)),
                    ("end", self.boolean_exit(T))]
        nxt = min(rnd + 1, LATER)
        if index == 0:
            return [("play:" + format_profile(self.agents, prof),
                     (seeker, q, T, n, rnd, STEP, 1, j))
                    for j, (prof, _) in enumerate(self.moves[q])]
        succ = self.moves[q][stage][1]
        return [("to:" + self.model.states[q2], self.enter_adjust(seeker, q2, T, n, nxt))
                for q2 in succ]

    def describe(self, pos) -> str:
        if pos[0] == ENDING:
            return f"winner={'E' if pos[1] == ELOISE else 'A'}"
        seeker, q, T, n, rnd, phase, index, stage = pos
        head = (f"S={'E' if seeker == ELOISE else 'A'} q={self.model.states[q]} "
                f"T={encode_truth(T)} n={n} r={ROUND_NAMES[rnd]}")
        if phase == ADJUST:
            return f"{head} ph=adjust:{index}:{ADJUST_STAGES[stage]}"
        if phase == DECIDE:
            return f"{head} ph=decide:{('seeker-choice', 'opponent-choice')[index]}"
        if index == 0:
            return f"{head} ph=step:verifier-picks"
        prof = format_profile(self.agents, self.moves[q][stage][0])
        return f"{head} ph=step:falsifier-picks:{prof}"


@dataclass
class Arena:
    game: TransitionGame
    positions: list = field(default_factory=list)
    index: dict = field(default_factory=dict)
    owner: list = field(default_factory=list)
    succ: list = field(default_factory=list)
    labels: list = field(default_factory=list)
    target: set = field(default_factory=set)
    initial: dict = field(default_factory=dict)   # state name -> position id

    def __len__(self):
        return len(self.positions)

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.succ)

    def graph(self) -> GameGraph:
        return GameGraph(self.owner, self.succ, self.target)

    def id_of(self, pos) -> int:
        return self.index[pos]

    def dump(self) -> str:
        g = self.game
        lines = []
        for i, pos in enumerate(self.positions):
            kind = "ending" if pos[0] == ENDING else "config"
            lines.append(f"{i} {'EA'[self.owner[i]]} {kind} {g.describe(pos)}")
        lines.append("# edges")
        for i, (out, labs) in enumerate(zip(self.succ, self.labels)):
            for j, lab in zip(out, labs):
                lines.append(f"{i} {lab} {j}")
        lines.append("# buchi")
        lines.extend(str(i) for i in sorted(self.target))
        return "\n".join(lines) + "\n"


def build_transition_arena(model: Cgm, labels: Labeling, agents, path: Formula,
                           verifier: int = ELOISE, prune_claims: bool = False) -> Arena:
    """Breadth-first construction from the initial configuration of every state."""
    game = TransitionGame(model, labels, agents, path, verifier, prune_claims)
    arena = Arena(game)
    index = arena.index
    positions = arena.positions
    queue = deque()

    def add(pos) -> int:
        i = index.get(pos)
        if i is None:
            i = len(positions)
            index[pos] = i
            positions.append(pos)
            arena.owner.append(game.owner(pos))
            arena.succ.append(None)
            arena.labels.append(None)
            if pos[0] == ENDING:
                if pos[1] == ABELARD:
                    arena.target.add(i)
            elif pos[0] == ELOISE:
                arena.target.add(i)
            queue.append(i)
        return i

    for qi, q in enumerate(model.states):
        arena.initial[q] = add(game.initial(qi))
    while queue:
        i = queue.popleft()
        moves = game.enumerate_moves(positions[i])
        arena.labels[i] = [lab for lab, _ in moves]
        arena.succ[i] = [add(p) for _, p in moves]
    return arena


def parse_dump(text: str) -> GameGraph:
    """Read the owner/edge/target sections of an arena dump back into a game graph."""
    owner = {}
    edges = {}
    target = set()
    section = "positions"
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            section = line[1:].strip()
            continue
        parts = line.split()
        if section == "positions":
            owner[int(parts[0])] = ELOISE if parts[1] == "E" else ABELARD
        elif section == "edges":
            edges.setdefault(int(parts[0]), []).append(int(parts[-1]))
        elif section == "buchi":
            target.add(int(parts[0]))
    n = len(owner)
    return GameGraph([owner[i] for i in range(n)], [edges.get(i, []) for i in range(n)], target)
