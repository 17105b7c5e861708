# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # Timers, and why no fixed depth is enough
#
# In the three-state model below, `a1` may wait at `q0` as long as it likes
# before moving on to `q1`, and `a2` then decides when to leave `q1` for the
# absorbing `q2`.  Agent `a2` wants `G p1 | F p2`: either the token stays at
# `q0` forever, or it reaches `q2`.

# %%
from atlplus import m3, model_check, parse_formula
from atlplus.bounded import bounded_check, stable_timer
from atlplus.formula import expand_abbreviations
from atlplus.oracle import eval_finite_path

model = m3()
goal = parse_formula("<<a2>>(G p1 | F p2)")
path = expand_abbreviations(goal).path
print(model_check(model, goal).per_state)

# %% [markdown]
# On finite prefixes the goal can look lost: after waiting at `q0` and
# stepping to `q1`, neither disjunct holds yet.  Whatever depth we pick,
# `a1` can wait one step longer, so truth on all prefixes of one fixed
# length is not the right notion.  The full check is still true, because
# `a2` moves on to `q2` as soon as the token arrives at `q1`.

# %%
for wait in (1, 5, 20):
    prefix = ["q0"] * wait + ["q1"]
    print(wait, "steps at q0 then q1:", eval_finite_path(model, prefix, path))
print("with the step to q2:", eval_finite_path(model, ["q0"] * 5 + ["q1", "q2"], path))

# %% [markdown]
# The bounded engine gives each seeker turn a timer.  The number of states
# times the number of relative atoms is always enough; on the five-state
# example the verdicts settle much earlier.

# %%
from atlplus import mstar

star = mstar()
phi = parse_formula("<<a1>> ((!(X p3) & <<a2>> X p1) | (F p1 & (!p1) U p2))")
print("stable timer", stable_timer(star, expand_abbreviations(phi).path))
for timer in (1, 2, 3, 5, 20, 40):
    print(timer, [bounded_check(star, phi, q, timer) for q in star.states])
