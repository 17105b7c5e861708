"""Two-player Büchi games on explicit graphs.

Positions are integers ``0 .. n-1``.  Abelard is the Büchi player: he wins
an infinite play iff it visits the target set infinitely often; Eloise wins
all other plays.  Both winning regions come with positional strategies.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

ELOISE = 0
ABELARD = 1
PLAYER_NAMES = ("Eloise", "Abelard")

__all__ = ["ELOISE", "ABELARD", "GameGraph", "BuchiSolution", "attractor",
           "solve_buchi", "play_outcome"]


@dataclass
class GameGraph:
    owner: list[int]
    succ: list[list[int]]
    target: set[int]

    def __post_init__(self):
        if len(self.owner) != len(self.succ):
            raise ValueError("owner and successor lists differ in length")
        for v, out in enumerate(self.succ):
            if not out:
                raise ValueError(f"position {v} has no successor; the game graph must be serial")
        self._pred = None

    def __len__(self):
        return len(self.owner)

    @property
    def pred(self) -> list[list[int]]:
        if self._pred is None:
            pred = [[] for _ in self.owner]
            for v, out in enumerate(self.succ):
                for w in out:
                    pred[w].append(v)
            self._pred = pred
        return self._pred


@dataclass
class BuchiSolution:
    winner: list[int]
    strategy: dict[int, int]    # position -> chosen successor, for winner-owned positions

    def region(self, player: int) -> set[int]:
        return {v for v, w in enumerate(self.winner) if w == player}


def attractor(g: GameGraph, player: int, target, within=None):
    """Positions from which ``player`` forces a visit to ``target``.

    Returns ``(set, rank)`` where rank is the breadth-first layer.  When
    ``within`` is given, play is restricted to that subgame.
    """
    alive = within if within is not None else None
    rank = {v: 0 for v in target if alive is None or v in alive}
    # number of in-subgame successors not yet attracted, for opponent positions
    count = {}
    queue = deque(rank)
    pred = g.pred
    while queue:
        w = queue.popleft()
        r = rank[w] + 1
        for v in pred[w]:
            if v in rank or (alive is not None and v not in alive):
                continue
            if g.owner[v] == player:
                rank[v] = r
                queue.append(v)
            else:
                c = count.get(v)
                if c is None:
                    c = sum(1 for x in g.succ[v] if alive is None or x in alive)
                c -= 1
                count[v] = c
                if c == 0:
                    rank[v] = r
                    queue.append(v)
    return set(rank), rank


def _attractor_moves(g, player, rank, strategy):
    # player-owned attracted positions move to the lowest-id successor of lower rank
    for v, r in rank.items():
        if r > 0 and g.owner[v] == player:
            strategy[v] = min(w for w in g.succ[v] if rank.get(w, r) < r)


def solve_buchi(g: GameGraph) -> BuchiSolution:
    """Classical fixpoint algorithm, O(|positions| * |edges|)."""
    n = len(g)
    remaining = set(range(n))
    winner = [ABELARD] * n
    strategy: dict[int, int] = {}
    while True:
        reach, reach_rank = attractor(g, ABELARD, g.target & remaining, remaining)
        trap = remaining - reach
        if not trap:
            break
        # Eloise stays inside the trap, which avoids the target forever
        for v in trap:
            if g.owner[v] == ELOISE:
                strategy[v] = min(w for w in g.succ[v] if w in trap)
        won, rank = attractor(g, ELOISE, trap, remaining)
        _attractor_moves(g, ELOISE, rank, strategy)
        for v in won:
            winner[v] = ELOISE
        remaining -= won
    # Abelard's region: reach the target, then re-enter the region
    _attractor_moves(g, ABELARD, reach_rank, strategy)
    for v in remaining:
        if g.owner[v] == ABELARD and reach_rank.get(v) == 0:
            strategy[v] = min(w for w in g.succ[v] if w in remaining)
    return BuchiSolution(winner, strategy)


def play_outcome(g: GameGraph, start: int, choose) -> tuple[int, list[int], list[int]]:
    """Follow a deterministic play until it closes a lasso.

    ``choose(v)`` returns the successor taken at v.  Returns the winner of the
    play together with its prefix and cycle.
    """
    seen = {}
    path = []
    v = start
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        v = choose(v)
    i = seen[v]
    cycle = path[i:]
    won = ABELARD if any(w in g.target for w in cycle) else ELOISE
    return won, path[:i], cycle
