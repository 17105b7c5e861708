"""Explicit concurrent game models.

A model lists agents, states, propositions and actions; ``available`` gives
the nonempty action set d(a, q) of every agent at every state, and the
outcome function is stored as an explicit transition list that must cover
every admissible action profile exactly once.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import yaml

__all__ = ["Cgm", "ModelError", "load_model", "dump_model", "model_to_dict",
           "mstar", "m3", "builtin_model", "BUILTIN_MODELS", "format_profile"]


class ModelError(ValueError):
    """The model document is malformed or violates a model invariant."""


def format_profile(agents: Sequence[str], profile: Sequence[str]) -> str:
    return ",".join(f"{a}={x}" for a, x in zip(agents, profile))


@dataclass(eq=False)
class Cgm:
    agents: tuple[str, ...]
    states: tuple[str, ...]
    propositions: tuple[str, ...]
    actions: tuple[str, ...]
    available: dict[tuple[str, str], tuple[str, ...]]
    transitions: dict[tuple[str, tuple[str, ...]], str]
    valuation: dict[str, frozenset[str]]
    _moves: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.validate()
        self.state_index = {q: i for i, q in enumerate(self.states)}

    # -- validation -------------------------------------------------------
    def validate(self) -> None:
        for kind, names in (("agent", self.agents), ("state", self.states),
                            ("proposition", self.propositions), ("action", self.actions)):
            if len(set(names)) != len(names):
                raise ModelError(f"duplicate {kind} name in {list(names)}")
        if not self.states:
            raise ModelError("model has no states")
        acts = set(self.actions)
        for a in self.agents:
            for q in self.states:
                d = self.available.get((a, q))
                if d is None:
                    raise ModelError(f"no available actions given for agent {a} at state {q}")
                if not d:
                    raise ModelError(f"empty action set for agent {a} at state {q}")
                for x in d:
                    if x not in acts:
                        raise ModelError(f"undeclared action {x!r} for agent {a} at state {q}")
        for (a, q) in self.available:
            if a not in self.agents:
                raise ModelError(f"undeclared agent {a!r} in available")
            if q not in self.states:
                raise ModelError(f"undeclared state {q!r} in available")
        states = set(self.states)
        for (q, prof), q2 in self.transitions.items():
            if q not in states:
                raise ModelError(f"undeclared state {q!r} in transitions")
            if q2 not in states:
                raise ModelError(f"undeclared target state {q2!r} in transitions")
            if len(prof) != len(self.agents) or any(
                    x not in self.available[(a, q)] for a, x in zip(self.agents, prof)):
                raise ModelError(f"inadmissible profile ({q}, {', '.join(prof)})")
        missing = [(q, prof) for q in self.states for prof in self.profiles(q)
                   if (q, prof) not in self.transitions]
        if missing:
            listed = "; ".join(f"({q}, {', '.join(p)})" for q, p in missing)
            raise ModelError(f"outcome function is not total, missing: {listed}")
        for p, qs in self.valuation.items():
            if p not in self.propositions:
                raise ModelError(f"undeclared proposition {p!r} in valuation")
            for q in qs:
                if q not in states:
                    raise ModelError(f"undeclared state {q!r} in valuation of {p}")

    # -- queries ----------------------------------------------------------
    def profiles(self, q: str, agents: Iterable[str] | None = None):
        """All action profiles at q for ``agents`` (default: everyone), in model order."""
        group = self.agents if agents is None else self.ordered(agents)
        return list(itertools.product(*(self.available[(a, q)] for a in group)))

    def ordered(self, agents: Iterable[str]) -> tuple[str, ...]:
        chosen = set(agents)
        unknown = chosen - set(self.agents)
        if unknown:
            raise ModelError(f"undeclared agent(s) {sorted(unknown)}")
        return tuple(a for a in self.agents if a in chosen)

    def outcome(self, q: str, profile: Mapping[str, str] | Sequence[str]) -> str:
        if isinstance(profile, Mapping):
            profile = tuple(profile.get(a) for a in self.agents)
        profile = tuple(profile)
        try:
            return self.transitions[(q, profile)]
        except KeyError:
            raise ModelError(f"inadmissible profile ({q}, {', '.join(map(str, profile))})") from None

    def coalition_moves(self, q: str, agents: Iterable[str]):
        """List of (A-profile, successor states) pairs, one per A-profile.

        Successors are listed once each, in state order.
        """
        coalition = self.ordered(agents)
        key = (q, coalition)
        if key in self._moves:
            return self._moves[key]
        pos = [self.agents.index(a) for a in coalition]
        by_profile: dict[tuple, set] = {}
        for prof in self.profiles(q):
            by_profile.setdefault(tuple(prof[i] for i in pos), set()).add(
                self.transitions[(q, prof)])
        order = self.state_index
        moves = [(mine, tuple(sorted(succ, key=order.__getitem__)))
                 for mine, succ in by_profile.items()]
        self._moves[key] = moves
        return moves

    def successors(self, q: str) -> tuple[str, ...]:
        return self.coalition_moves(q, ())[0][1]

    def holds(self, p: str, q: str) -> bool:
        return q in self.valuation.get(p, ())

    def __repr__(self):
        return f"Cgm(agents={list(self.agents)}, states={list(self.states)})"


# --------------------------------------------------------------------------
# documents

_KEYS = {"agents", "states", "propositions", "actions", "available", "transitions", "valuation"}


def _names(doc, key) -> tuple[str, ...]:
    val = doc.get(key, [])
    if not isinstance(val, list) or not all(isinstance(x, str) for x in val):
        raise ModelError(f"{key!r} must be a list of names")
    return tuple(val)


def model_from_dict(doc) -> Cgm:
    if not isinstance(doc, dict):
        raise ModelError("model document must be a mapping")
    unknown = set(doc) - _KEYS
    if unknown:
        raise ModelError(f"unknown key(s) {sorted(unknown)}")
    for key in ("agents", "states", "available", "transitions"):
        if key not in doc:
            raise ModelError(f"missing key {key!r}")
    agents = _names(doc, "agents")
    states = _names(doc, "states")
    props = _names(doc, "propositions")
    actions = _names(doc, "actions")
    if "actions" not in doc:
        # no global table given: collect the action names in order of appearance
        seen = {}
        for entry in doc["available"] or []:
            if isinstance(entry, dict) and isinstance(entry.get("actions"), list):
                seen.update(dict.fromkeys(x for x in entry["actions"] if isinstance(x, str)))
        actions = tuple(seen)

    available = {}
    for entry in doc["available"] or []:
        if not isinstance(entry, dict) or set(entry) != {"agent", "state", "actions"}:
            raise ModelError(f"bad available entry {entry!r}; need agent, state, actions")
        if not isinstance(entry["actions"], list):
            raise ModelError(f"actions of available entry {entry!r} must be a list")
        key = (entry["agent"], entry["state"])
        if key in available:
            raise ModelError(f"duplicate available entry for agent {key[0]} at state {key[1]}")
        available[key] = tuple(entry["actions"])

    transitions = {}
    for entry in doc["transitions"] or []:
        if not isinstance(entry, dict) or set(entry) != {"from", "profile", "to"}:
            raise ModelError(f"bad transition entry {entry!r}; need from, profile, to")
        prof = entry["profile"]
        if not isinstance(prof, dict):
            raise ModelError(f"profile of {entry!r} must be a mapping agent -> action")
        extra = set(prof) - set(agents)
        if extra:
            raise ModelError(f"undeclared agent(s) {sorted(extra)} in transition profile")
        missing = [a for a in agents if a not in prof]
        if missing:
            raise ModelError(f"transition from {entry['from']} lacks actions for {missing}")
        key = (entry["from"], tuple(prof[a] for a in agents))
        if key in transitions:
            raise ModelError(f"duplicate transition for ({key[0]}, {', '.join(key[1])})")
        transitions[key] = entry["to"]

    valuation = {}
    raw_val = doc.get("valuation") or {}
    if not isinstance(raw_val, dict):
        raise ModelError("valuation must map propositions to state lists")
    for p, qs in raw_val.items():
        if not isinstance(qs, list):
            raise ModelError(f"valuation of {p} must be a list of states")
        valuation[p] = frozenset(qs)
    for p in props:
        valuation.setdefault(p, frozenset())
    return Cgm(agents, states, props, actions, available, transitions, valuation)


def load_model(source) -> Cgm:
    """Load a model from a path, a document string, or an already parsed mapping."""
    if isinstance(source, dict):
        return model_from_dict(source)
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                    and Path(source).is_file()):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ModelError(f"cannot parse model document: {exc}") from None
    return model_from_dict(doc)


def model_to_dict(m: Cgm) -> dict:
    return {
        "agents": list(m.agents),
        "states": list(m.states),
        "propositions": list(m.propositions),
        "actions": list(m.actions),
        "available": [{"agent": a, "state": q, "actions": list(m.available[(a, q)])}
                      for q in m.states for a in m.agents],
        "transitions": [{"from": q, "profile": dict(zip(m.agents, prof)),
                         "to": m.transitions[(q, prof)]}
                        for q in m.states for prof in m.profiles(q)],
        "valuation": {p: [q for q in m.states if q in m.valuation[p]] for p in m.propositions},
    }


def dump_model(m: Cgm) -> str:
    return yaml.safe_dump(model_to_dict(m), sort_keys=False, default_flow_style=None)


# --------------------------------------------------------------------------
# bundled models

def _build(agents, states, props, d, edges, valuation, actions=("alpha", "beta")) -> Cgm:
    available = {(a, q): tuple(d.get((a, q), ("alpha",))) for a in agents for q in states}
    transitions = {(q, tuple(prof)): q2 for (q, prof), q2 in edges.items()}
    return Cgm(tuple(agents), tuple(states), tuple(props), tuple(actions), available,
               transitions, {p: frozenset(v) for p, v in valuation.items()})


def mstar() -> Cgm:
    """Five-state, two-agent running example (a2 chooses at q0, a1 at q1)."""
    ab = ("alpha", "beta")
    return _build(
        ["a1", "a2"], ["q0", "q1", "q2", "q3", "q4"], ["p1", "p2", "p3"],
        {("a2", "q0"): ab, ("a1", "q1"): ab},
        {("q0", ("alpha", "alpha")): "q1", ("q0", ("alpha", "beta")): "q2",
         ("q1", ("alpha", "alpha")): "q3", ("q1", ("beta", "alpha")): "q4",
         ("q2", ("alpha", "alpha")): "q3", ("q3", ("alpha", "alpha")): "q1",
         ("q4", ("alpha", "alpha")): "q4"},
        {"p1": {"q2", "q4"}, "p2": {"q3"}, "p3": {"q1"}},
    )


def m3() -> Cgm:
    """Three-state model where a1 may stall at q0 and a2 may stall at q1."""
    ab = ("alpha", "beta")
    return _build(
        ["a1", "a2"], ["q0", "q1", "q2"], ["p1", "p2"],
        {("a1", "q0"): ab, ("a2", "q1"): ab},
        {("q0", ("beta", "alpha")): "q0", ("q0", ("alpha", "alpha")): "q1",
         ("q1", ("alpha", "beta")): "q1", ("q1", ("alpha", "alpha")): "q2",
         ("q2", ("alpha", "alpha")): "q2"},
        {"p1": {"q0"}, "p2": {"q2"}},
    )


def hub() -> Cgm:
    """Agent a picks sp or sq at the hub h; both return to h.

    Visiting both p and q needs memory: every positional strategy picks the
    same spoke at every visit.
    """
    return _build(
        ["a"], ["h", "sp", "sq"], ["p", "q"],
        {("a", "h"): ("alpha", "beta")},
        {("h", ("alpha",)): "sp", ("h", ("beta",)): "sq",
         ("sp", ("alpha",)): "h", ("sq", ("alpha",)): "h"},
        {"p": {"sp"}, "q": {"sq"}},
    )


BUILTIN_MODELS = {"mstar": mstar, "m3": m3, "hub": hub}


def builtin_model(name: str) -> Cgm:
    try:
        return BUILTIN_MODELS[name]()
    except KeyError:
        raise ModelError(f"no built-in model named {name!r}") from None
