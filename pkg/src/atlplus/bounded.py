"""Timer-bounded evaluation games solved by backward induction.

The whole evaluation game is searched on the fly, nested transition games
included: a challenged claim continues as an evaluation game on the
claimed formula and a coalition subformula starts a fresh transition game.
Eloise's positions are OR nodes, Abelard's AND nodes, and every play is
finite because timers and seeker counters only go down.

Positions are plain tuples::

    ("eval", verifier, q, formula)
    (game, seeker, q, T, n, timer, round, phase, index, stage)

where ``game`` is the integer id of a (verifier, coalition formula) pair.
"""
from __future__ import annotations

from enum import Enum
from typing import Callable

from .cgm import Cgm
from .formula import (AtomKind, Coalition, Formula, Not, Or, Prop, Top, atom_kind,
                      evaluate_boolean, expand_abbreviations, relative_atoms)

__all__ = ["TimerPolicy", "BoundedSolver", "bounded_check", "stable_timer"]

ELOISE, ABELARD = 0, 1
OPEN, TRUE, FALSE = 0, 1, 2
ADJUST, DECIDE, STEP = 0, 1, 2


class TimerPolicy(str, Enum):
    CANONICAL_MAX = "canonical-max"
    EXHAUSTIVE = "exhaustive"


def stable_timer(model: Cgm, path: Formula) -> int:
    """|St| * |At(path)|."""
    return len(model.states) * len(relative_atoms(path))


class _Game:
    """Static data of one transition game g(V, ., <<A>>Phi, Gamma)."""

    def __init__(self, model: Cgm, verifier: int, formula: Coalition, bound: int):
        self.verifier = verifier
        self.formula = formula
        self.path = formula.path
        self.atoms = relative_atoms(formula.path)
        self.kinds = [atom_kind(a) for a in self.atoms]
        self.k = len(self.atoms)
        self.bound = bound
        agents = model.ordered(formula.agents)
        self.moves = [[tuple(model.state_index[s] for s in succ)
                       for _, succ in model.coalition_moves(q, agents)]
                      for q in model.states]

    def value(self, T, atom) -> bool:
        try:
            i = self.atoms.index(atom)
        except ValueError:
            raise KeyError(f"{atom} is not in the domain of the truth function") from None
        return T[i] == TRUE


class BoundedSolver:
    """AND-OR search over bounded evaluation games on one model.

    ``timer`` is a fixed bound, a function from coalition formula to bound,
    or None for the per-formula stable bound.  With ``memoize`` the solved
    positions are kept (keyed by the full position, timer and round
    included) and shared between queries on this solver.
    """

    def __init__(self, model: Cgm, timer: int | Callable | None = None,
                 policy: TimerPolicy | str = TimerPolicy.CANONICAL_MAX, memoize: bool = True):
        self.model = model
        if isinstance(timer, int) and timer < 1:
            raise ValueError("timer bound must be at least 1")
        self.timer = timer
        self.policy = TimerPolicy(policy)
        self.memoize = memoize
        self.memo: dict = {}
        self.games: list[_Game] = []
        self._game_ids: dict = {}
        self.expanded = 0

    def bound_for(self, f: Coalition) -> int:
        if self.timer is None:
            b = stable_timer(self.model, f.path)
        elif callable(self.timer):
            b = self.timer(f)
        else:
            b = self.timer
        if b < 1:
            raise ValueError(f"timer bound for {f} must be at least 1")
        return b

    def game_id(self, verifier: int, f: Coalition) -> int:
        key = (verifier, f)
        gid = self._game_ids.get(key)
        if gid is None:
            gid = len(self.games)
            self.games.append(_Game(self.model, verifier, f, self.bound_for(f)))
            self._game_ids[key] = gid
        return gid

    # -- rules -------------------------------------------------------------
    def _enter_adjust(self, g: _Game, gid, seeker, q, T, n, timer, rnd, start):
        for i in range(start, g.k):
            if T[i] != OPEN:
                continue
            kind = g.kinds[i]
            if kind is AtomKind.UNTIL or (kind is AtomKind.NEXT and rnd == 1) or \
                    (kind is AtomKind.STATE and rnd == 0):
                return (gid, seeker, q, T, n, timer, rnd, ADJUST, i, 0)
        return self._decide(g, gid, seeker, q, T, n, timer, rnd)

    def _decide(self, g, gid, seeker, q, T, n, timer, rnd):
        if timer == 0:
            return self._opponent(g, gid, seeker, q, T, n, timer, rnd)
        return (gid, seeker, q, T, n, timer, rnd, DECIDE, 0, 0)

    def _opponent(self, g, gid, seeker, q, T, n, timer, rnd):
        if n == 0:
            return self._exit(g, T)
        return (gid, seeker, q, T, n, timer, rnd, DECIDE, 1, 0)

    def _exit(self, g: _Game, T) -> bool:
        """Boolean exit: whether Eloise wins the evaluation of Phi under T."""
        v_wins = evaluate_boolean(g.path, lambda a: g.value(T, a))
        return v_wins == (g.verifier == ELOISE)

    def expand(self, pos):
        """Either a bool (Eloise wins) or ``(owner, children)``."""
        self.expanded += 1
        model = self.model
        if pos[0] == "eval":
            _, P, q, f = pos
            if isinstance(f, Top):
                return P == ELOISE
            if isinstance(f, Prop):
                return model.holds(f.name, model.states[q]) == (P == ELOISE)
            if isinstance(f, Not):
                return (P, [("eval", 1 - P, q, f.arg)])
            if isinstance(f, Or):
                return (P, [("eval", P, q, f.left), ("eval", P, q, f.right)])
            if isinstance(f, Coalition):
                gid = self.game_id(P, f)
                g = self.games[gid]
                return (P, [self._enter_adjust(g, gid, P, q, (OPEN,) * g.k, g.k, g.bound, 0, 0)])
            raise TypeError(f"not an expanded state formula: {f}")

        gid, seeker, q, T, n, timer, rnd, phase, index, stage = pos
        g = self.games[gid]
        V = g.verifier
        W = 1 - V
        if phase == ADJUST:
            i = index
            atom = g.atoms[i]
            kind = g.kinds[i]
            if stage < 4:
                claimed = atom.right if kind is AtomKind.UNTIL else (
                    atom.arg if kind is AtomKind.NEXT else atom)
            else:
                claimed = Not(atom.left)
            claimant = V if stage in (0, 1, 4, 5) else W
            if stage % 2 == 0:
                # offer: claim, or pass to the next offer in the fixed order
                if stage == 6 or (stage == 2 and kind is not AtomKind.UNTIL):
                    passed = self._enter_adjust(g, gid, seeker, q, T, n, timer, rnd, i + 1)
                else:
                    passed = (gid, seeker, q, T, n, timer, rnd, ADJUST, i, stage + 2)
                return (claimant, [(gid, seeker, q, T, n, timer, rnd, ADJUST, i, stage + 1), passed])
            # respond: accept updates T, challenge continues on the claim itself
            new = TRUE if stage < 4 else FALSE
            T2 = T[:i] + (new,) + T[i + 1:]
            accepted = self._enter_adjust(g, gid, seeker, q, T2, n, timer, rnd, i + 1)
            return (1 - claimant, [accepted, ("eval", claimant, q, claimed)])
        if phase == DECIDE:
            if index == 0:
                if self.policy is TimerPolicy.CANONICAL_MAX:
                    timers = (timer - 1,)
                else:
                    timers = range(timer - 1, -1, -1)
                go = [(gid, seeker, q, T, n, t, rnd, STEP, 0, 0) for t in timers]
                return (seeker, go + [self._opponent(g, gid, seeker, q, T, n, timer, rnd)])
            if self.policy is TimerPolicy.CANONICAL_MAX:
                timers = (g.bound - 1,)
            else:
                timers = range(g.bound - 1, -1, -1)
            take = [(gid, 1 - seeker, q, T, n - 1, t, rnd, STEP, 0, 0) for t in timers]
            return (1 - seeker, take + [self._exit(g, T)])
        if index == 0:
            return (V, [(gid, seeker, q, T, n, timer, rnd, STEP, 1, j)
                        for j in range(len(g.moves[q]))])
        nxt = min(rnd + 1, 2)
        return (W, [self._enter_adjust(g, gid, seeker, q2, T, n, timer, nxt, 0)
                    for q2 in g.moves[q][stage]])

    # -- search ------------------------------------------------------------
    def solve(self, root) -> bool:
        """Eloise wins from ``root``; iterative depth-first AND-OR search."""
        memo = self.memo if self.memoize else {}
        if isinstance(root, bool):
            return root
        if root in memo:
            return memo[root]
        stack = [[root, None, None, 0]]    # position, owner, children, next child
        ret = None
        while stack:
            frame = stack[-1]
            pos, owner, children, i = frame
            if children is None:
                node = self.expand(pos)
                if isinstance(node, bool):
                    if self.memoize:
                        memo[pos] = node
                    stack.pop()
                    ret = node
                    continue
                owner, children = node
                frame[1], frame[2] = owner, children
            elif ret == (owner == ELOISE):
                # decisive child: Eloise found a win, or Abelard found a refutation
                if self.memoize:
                    memo[pos] = ret
                stack.pop()
                continue
            else:
                i += 1
            # look for the next child that needs a search
            while i < len(children):
                child = children[i]
                if isinstance(child, bool):
                    val = child
                else:
                    val = memo.get(child)
                if val is None:
                    break
                if val == (owner == ELOISE):
                    break
                i += 1
            frame[3] = i
            if i == len(children):
                ret = owner != ELOISE
                if self.memoize:
                    memo[pos] = ret
                stack.pop()
                continue
            child = children[i]
            val = child if isinstance(child, bool) else memo.get(child)
            if val is not None:
                # decisive and already known
                ret = val
                if self.memoize:
                    memo[pos] = ret
                stack.pop()
                continue
            ret = None
            stack.append([child, None, None, 0])
        return ret

    def wins(self, formula: Formula, q: str) -> bool:
        """Eloise wins G(M, q, formula, bound) (formula is expanded here)."""
        f = expand_abbreviations(formula)
        return self.solve(("eval", ELOISE, self.model.state_index[q], f))


def bounded_check(model: Cgm, formula: Formula, q: str, timer: int | Callable | None = None,
                  policy: TimerPolicy | str = TimerPolicy.CANONICAL_MAX,
                  memoize: bool = True) -> bool:
    """Whether Eloise wins the timer-bounded evaluation game from q."""
    if isinstance(timer, int) and timer == 0:
        raise ValueError("timer bound must be at least 1")
    return BoundedSolver(model, timer, policy, memoize).wins(formula, q)
