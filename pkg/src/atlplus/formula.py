"""ATL+ formulas: syntax tree, parser, printer and structural analysis.

The surface grammar, lowest precedence first::

    formula := disj ('->' formula)?
    disj    := conj ('|' conj)*
    conj    := unary ('&' unary)*
    unary   := '!' unary | '<<' agents '>>' unary | binary
    binary  := prefix (('U' | 'R') prefix)?
    prefix  := ('X' | 'F' | 'G' | '!') prefix | '<<' agents '>>' prefix | atom
    atom    := '(' formula ')' | 'true' | 'false' | IDENT

``U`` and ``R`` do not chain without parentheses.  ``false`` is read as
``!true``.  Temporal operators may only be applied to state formulas, and
a formula handed to the checker must itself be a state formula.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, NamedTuple

__all__ = [
    "Formula", "Top", "Prop", "Not", "Or", "And", "Implies", "Coalition",
    "Next", "Until", "Eventually", "Always", "Release",
    "ParseError", "ShapeError", "AtomKind", "Polarity", "FragmentReport",
    "parse_formula", "to_text", "expand_abbreviations", "is_state",
    "relative_atoms", "atom_kind", "atom_polarities", "fragment_width",
    "strategic_subformulas", "subformulas", "evaluate_boolean", "FALSE",
]


class Formula:
    """Base class of all syntax tree nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)

    def children(self) -> tuple["Formula", ...]:
        return ()


def _cached_hash(cls):
    # Frozen dataclasses recompute their hash recursively on every call;
    # formulas are used as dict keys in hot loops, so cache it.
    plain = cls.__hash__

    def __hash__(self):
        try:
            return self.__dict__["_h"]
        except KeyError:
            h = plain(self)
            object.__setattr__(self, "_h", h)
            return h

    cls.__hash__ = __hash__
    return cls


@_cached_hash
@dataclass(frozen=True)
class Top(Formula):
    pass


@_cached_hash
@dataclass(frozen=True)
class Prop(Formula):
    name: str


@_cached_hash
@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@_cached_hash
@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@_cached_hash
@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@_cached_hash
@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@_cached_hash
@dataclass(frozen=True)
class Coalition(Formula):
    """``<<agents>> path``; agents are kept sorted and unique."""

    agents: tuple[str, ...]
    path: Formula

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(sorted(set(self.agents))))

    def children(self):
        return (self.path,)


@_cached_hash
@dataclass(frozen=True)
class Next(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@_cached_hash
@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@_cached_hash
@dataclass(frozen=True)
class Eventually(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@_cached_hash
@dataclass(frozen=True)
class Always(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@_cached_hash
@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


FALSE = Not(Top())

_TEMPORAL = (Next, Until, Eventually, Always, Release)
_KERNEL = (Top, Prop, Not, Or, Coalition, Next, Until)


def is_state(f: Formula) -> bool:
    """True iff no temporal operator occurs outside a coalition operator."""
    if isinstance(f, (Top, Prop, Coalition)):
        return True
    if isinstance(f, _TEMPORAL):
        return False
    return all(is_state(c) for c in f.children())


# --------------------------------------------------------------------------
# parsing

class ParseError(ValueError):
    """Raised for malformed formula text; ``pos`` is a character offset."""

    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        where = f" at position {pos}"
        if text:
            where += f": {text[:pos]}<HERE>{text[pos:]}"
        super().__init__(message + where)


class ShapeError(ParseError):
    """Well-formed text that is not an ATL+ formula (e.g. ``<<a>> G F p``)."""


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<op><<|>>|->|[()!&|,])|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<bad>\S))"
)
_KEYWORDS = {"X", "F", "G", "U", "R", "true", "false"}


class _Tok(NamedTuple):
    kind: str   # 'op', 'kw', 'ident', 'eof'
    value: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:   # only trailing whitespace left
            break
        if m.group("bad") is not None:
            raise ParseError(f"unexpected character {m.group('bad')!r}", m.start("bad"), text)
        if m.group("op") is not None:
            toks.append(_Tok("op", m.group("op"), m.start("op")))
        else:
            word = m.group("ident")
            kind = "kw" if word in _KEYWORDS else "ident"
            toks.append(_Tok(kind, word, m.start("ident")))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, *values: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.value in values

    def expect(self, value: str) -> _Tok:
        if not self.at(value):
            self.fail(f"expected {value!r}, found {self.tok.value or 'end of input'!r}")
        return self.take()

    def fail(self, msg: str, pos: int | None = None, cls=ParseError):
        raise cls(msg, self.tok.pos if pos is None else pos, self.text)

    def state_operand(self, f: Formula, op: str, pos: int) -> Formula:
        if not is_state(f):
            self.fail(f"operand of {op} must be a state formula, got {to_text(f)!r}",
                      pos, ShapeError)
        return f

    def formula(self) -> Formula:
        left = self.disj()
        if self.at("->"):
            self.take()
            return Implies(left, self.formula())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.at("|"):
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.at("&"):
            self.take()
            f = And(f, self.unary())
        return f

    def coalition_head(self) -> tuple[str, ...]:
        self.expect("<<")
        agents = []
        if self.tok.kind == "ident":
            agents.append(self.take().value)
            while self.at(","):
                self.take()
                if self.tok.kind != "ident":
                    self.fail("expected agent name")
                agents.append(self.take().value)
        if not self.at(">>"):
            self.fail("unbalanced '<<': expected '>>'")
        self.take()
        return tuple(agents)

    def unary(self) -> Formula:
        if self.at("!"):
            self.take()
            return Not(self.unary())
        if self.at("<<"):
            return Coalition(self.coalition_head(), self.unary())
        return self.binary()

    def binary(self) -> Formula:
        left = self.prefix()
        if self.at("U", "R"):
            op = self.take()
            right = self.prefix()
            self.state_operand(left, op.value, op.pos)
            self.state_operand(right, op.value, op.pos)
            if self.at("U", "R"):
                self.fail(f"{op.value} is not associative; add parentheses")
            return Until(left, right) if op.value == "U" else Release(left, right)
        return left

    def prefix(self) -> Formula:
        if self.at("X", "F", "G"):
            op = self.take()
            arg = self.state_operand(self.prefix(), op.value, op.pos)
            return {"X": Next, "F": Eventually, "G": Always}[op.value](arg)
        if self.at("!"):
            self.take()
            return Not(self.prefix())
        if self.at("<<"):
            return Coalition(self.coalition_head(), self.prefix())
        return self.atom()

    def atom(self) -> Formula:
        t = self.tok
        if self.at("("):
            self.take()
            f = self.formula()
            if not self.at(")"):
                self.fail("expected ')'")
            self.take()
            return f
        if self.at("true"):
            self.take()
            return Top()
        if self.at("false"):
            self.take()
            return FALSE
        if t.kind == "ident":
            self.take()
            return Prop(t.value)
        if t.kind == "eof":
            self.fail("unexpected end of input")
        self.fail(f"unexpected token {t.value!r}")


def parse_formula(text: str) -> Formula:
    """Parse surface syntax into a state formula (abbreviations kept)."""
    p = _Parser(text)
    f = p.formula()
    if p.tok.kind != "eof":
        p.fail(f"unexpected token {p.tok.value!r}")
    if not is_state(f):
        raise ShapeError("a temporal operator occurs outside any coalition operator",
                         0, text)
    return f


# --------------------------------------------------------------------------
# printing

def _wrap(f: Formula) -> str:
    s = to_text(f)
    return s if isinstance(f, (Top, Prop)) else f"({s})"


def to_text(f: Formula) -> str:
    """Render ``f`` in the surface grammar; ``parse_formula`` inverts it."""
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Not):
        return "!" + _wrap(f.arg)
    if isinstance(f, Coalition):
        return f"<<{','.join(f.agents)}>>" + _wrap(f.path)
    if isinstance(f, (Next, Eventually, Always)):
        op = {Next: "X", Eventually: "F", Always: "G"}[type(f)]
        return f"{op} {_wrap(f.arg)}"
    op = {Or: "|", And: "&", Implies: "->", Until: "U", Release: "R"}[type(f)]
    return f"{_wrap(f.left)} {op} {_wrap(f.right)}"


# --------------------------------------------------------------------------
# abbreviations

def expand_abbreviations(f: Formula) -> Formula:
    """Rewrite &, ->, F, G and R into the kernel connectives."""
    if isinstance(f, (Top, Prop)):
        return f
    if isinstance(f, Not):
        return Not(expand_abbreviations(f.arg))
    if isinstance(f, Or):
        return Or(expand_abbreviations(f.left), expand_abbreviations(f.right))
    if isinstance(f, And):
        return Not(Or(Not(expand_abbreviations(f.left)), Not(expand_abbreviations(f.right))))
    if isinstance(f, Implies):
        return Or(Not(expand_abbreviations(f.left)), expand_abbreviations(f.right))
    if isinstance(f, Coalition):
        return Coalition(f.agents, expand_abbreviations(f.path))
    if isinstance(f, Next):
        return Next(expand_abbreviations(f.arg))
    if isinstance(f, Until):
        return Until(expand_abbreviations(f.left), expand_abbreviations(f.right))
    if isinstance(f, Eventually):
        return Until(Top(), expand_abbreviations(f.arg))
    if isinstance(f, Always):
        return Not(Until(Top(), Not(expand_abbreviations(f.arg))))
    if isinstance(f, Release):
        return Not(Until(Not(expand_abbreviations(f.left)), Not(expand_abbreviations(f.right))))
    raise TypeError(f"not a formula: {f!r}")


def _check_kernel(f: Formula) -> None:
    if not isinstance(f, _KERNEL):
        raise ValueError(f"{type(f).__name__} found; call expand_abbreviations first")


# --------------------------------------------------------------------------
# relative atoms

class AtomKind(Enum):
    STATE = "state"
    NEXT = "next"
    UNTIL = "until"


def atom_kind(atom: Formula) -> AtomKind:
    if isinstance(atom, Until):
        return AtomKind.UNTIL
    if isinstance(atom, Next):
        return AtomKind.NEXT
    return AtomKind.STATE


def _atom_occurrences(f: Formula, negs: int = 0) -> Iterator[tuple[Formula, int]]:
    _check_kernel(f)
    if isinstance(f, Not):
        yield from _atom_occurrences(f.arg, negs + 1)
    elif isinstance(f, Or):
        yield from _atom_occurrences(f.left, negs)
        yield from _atom_occurrences(f.right, negs)
    else:
        # Top counts as a state atom: every claim about it is trivially true.
        yield f, negs


def relative_atoms(path: Formula) -> tuple[Formula, ...]:
    """At(path) in document order of first occurrence."""
    seen: dict[Formula, None] = {}
    for atom, _ in _atom_occurrences(path):
        seen.setdefault(atom)
    return tuple(seen)


class Polarity(NamedTuple):
    positive: bool
    negative: bool


def atom_polarities(path: Formula) -> dict[Formula, Polarity]:
    pos: dict[Formula, bool] = {}
    neg: dict[Formula, bool] = {}
    for atom, negs in _atom_occurrences(path):
        pos.setdefault(atom, False)
        neg.setdefault(atom, False)
        if negs % 2:
            neg[atom] = True
        else:
            pos[atom] = True
    return {a: Polarity(pos[a], neg[a]) for a in pos}


def evaluate_boolean(path: Formula, value_of) -> bool:
    """Evaluate the Boolean skeleton of ``path``; ``value_of(atom)`` gives leaves."""
    if isinstance(path, Not):
        return not evaluate_boolean(path.arg, value_of)
    if isinstance(path, Or):
        return evaluate_boolean(path.left, value_of) or evaluate_boolean(path.right, value_of)
    return value_of(path)


# --------------------------------------------------------------------------
# strategic structure

def subformulas(f: Formula) -> Iterator[Formula]:
    """All subformula occurrences, children before parents."""
    for c in f.children():
        yield from subformulas(c)
    yield f


def strategic_subformulas(f: Formula) -> tuple[Coalition, ...]:
    """Distinct coalition subformulas, innermost first."""
    seen: dict[Coalition, None] = {}
    for g in subformulas(f):
        if isinstance(g, Coalition):
            seen.setdefault(g)
    return tuple(seen)


@dataclass(frozen=True)
class FragmentReport:
    width: int
    subformulas: tuple[Coalition, ...]
    atom_counts: dict[Coalition, int] = field(hash=False)
    temporal_counts: dict[Coalition, int] = field(hash=False)


def fragment_width(f: Formula) -> FragmentReport:
    """Least k such that every ``<<A>>Phi`` in ``f`` has at most k relative atoms."""
    f = expand_abbreviations(f)
    subs = strategic_subformulas(f)
    counts, temporal = {}, {}
    for c in subs:
        atoms = relative_atoms(c.path)
        counts[c] = len(atoms)
        temporal[c] = sum(atom_kind(a) is not AtomKind.STATE for a in atoms)
    return FragmentReport(max(counts.values(), default=0), subs, counts, temporal)
