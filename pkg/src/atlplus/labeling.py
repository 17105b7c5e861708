"""Truth labels for state formulas, filled innermost-first by the checker."""
from __future__ import annotations

from .cgm import Cgm
from .formula import Coalition, Formula, Not, Or, Prop, Top


class MissingLabel(KeyError):
    def __init__(self, formula, state):
        self.formula = formula
        self.state = state
        super().__init__(f"no label for {formula} at state {state}")

    def __str__(self):
        return self.args[0]


class Labeling:
    """Truth of state formulas at states.

    Propositions come from the valuation; coalition formulas must have been
    entered with ``set`` before any formula containing them is queried.
    """

    def __init__(self, model: Cgm, entries: dict | None = None):
        self.model = model
        self.table: dict[Coalition, frozenset[str]] = dict(entries or {})
        self._cache: dict[tuple[Formula, str], bool] = {}

    def set(self, formula: Coalition, true_states) -> None:
        self.table[formula] = frozenset(true_states)

    def __contains__(self, formula) -> bool:
        return formula in self.table

    def holds(self, f: Formula, q: str) -> bool:
        key = (f, q)
        try:
            return self._cache[key]
        except KeyError:
            pass
        if isinstance(f, Top):
            val = True
        elif isinstance(f, Prop):
            val = self.model.holds(f.name, q)
        elif isinstance(f, Not):
            val = not self.holds(f.arg, q)
        elif isinstance(f, Or):
            val = self.holds(f.left, q) or self.holds(f.right, q)
        elif isinstance(f, Coalition):
            states = self.table.get(f)
            if states is None:
                raise MissingLabel(f, q)
            val = q in states
        else:
            raise TypeError(f"not an expanded state formula: {f}")
        self._cache[key] = val
        return val

    def true_states(self, f: Formula) -> frozenset[str]:
        return frozenset(q for q in self.model.states if self.holds(f, q))
