# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # A five-state game, checked three ways
#
# Two agents move a token around five states.  At `q0` agent `a2` picks the
# successor, at `q1` agent `a1` does, and everything else is forced.  We ask
# whether `a1` can make sure that either the next state is not a `p3` state
# while `a2` could reach `p1` in one step, or `p1` eventually holds while
# `p2` arrives before `p1`.

# %%
from atlplus import expand_abbreviations, fragment_width, model_check, mstar, parse_formula, to_text
from atlplus.formula import atom_polarities, relative_atoms

model = mstar()
print(model)
for q in model.states:
    for prof, succ in model.coalition_moves(q, ["a1", "a2"]):
        print(q, dict(zip(["a1", "a2"], prof)), "->", succ[0])

# %% [markdown]
# The formula uses `&` and `F`; after expansion only negation, disjunction,
# `X` and `U` are left.  The game tracks one status per relative atom.

# %%
phi = parse_formula("<<a1>> ((!(X p3) & <<a2>> X p1) | (F p1 & (!p1) U p2))")
f = expand_abbreviations(phi)
print(to_text(f))
for atom, pol in atom_polarities(f.path).items():
    print(f"{to_text(atom):<18} positive={pol.positive} negative={pol.negative}")
report = fragment_width(phi)
print("width", report.width, "subformulas innermost first:", [to_text(s) for s in report.subformulas])

# %% [markdown]
# Each coalition subformula gets its own transition arena, solved as a
# Büchi game.  The bounded engine searches the whole nested game instead,
# and the status oracle never builds a transition game at all.  All three
# give the same verdict at every state.

# %%
for engine in ("buchi", "bounded", "status-oracle"):
    v = model_check(model, phi, engine)
    print(f"{engine:<14}", v.per_state, v.stats.get("positions", "-"), "positions")

# %% [markdown]
# Only `q2` fails.  Its one successor `q3` lacks `p1`, so `a2` cannot make
# `p1` hold next and the left disjunct is out; `p1` already holds at `q2`
# itself, so `(!p1) U p2` is lost at once and the right disjunct is out too.
#
# A look at the first lines of the arena for the outer formula:

# %%
from atlplus.arena import build_transition_arena

labels = model_check(model, phi, "buchi").labels
arena = build_transition_arena(model, labels, f.agents, f.path)
print(len(arena), "positions,", arena.edge_count, "edges,", len(arena.target), "in the Büchi target")
print("\n".join(arena.dump().splitlines()[:12]))
