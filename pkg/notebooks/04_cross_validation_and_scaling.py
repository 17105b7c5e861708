# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # Cross-validation on random instances, and arena growth
#
# Random models with up to six states are paired with random formulas of
# width at most three.  Every engine labels every state, and formulas with
# one atom per coalition are also checked by classical fixpoint labelling.

# %%
from collections import Counter

from atlplus import cross_validate, random_instance
from atlplus.formula import fragment_width

widths = Counter()
disagreements = 0
for seed in range(60):
    model, phi = random_instance(seed)
    widths[fragment_width(phi).width] += 1
    disagreements += not cross_validate(model, phi).agree
print("widths", dict(widths), "disagreements", disagreements)

# %% [markdown]
# For a fixed formula the arena grows linearly with the model: here a chain
# where one agent advances or waits, checked for `F goal & G safe`.

# %%
import math
import statistics

from atlplus import Cgm, model_check, parse_formula


def chain(n):
    states = tuple(f"c{i}" for i in range(n))
    avail = {("a", q): ("alpha", "beta") for q in states}
    trans = {}
    for i, q in enumerate(states):
        trans[(q, ("alpha",))] = states[min(i + 1, n - 1)]
        trans[(q, ("beta",))] = q
    val = {"goal": frozenset({states[-1]}), "safe": frozenset(states)}
    return Cgm(("a",), states, ("goal", "safe"), ("alpha", "beta"), avail, trans, val)


phi = parse_formula("<<a>>(F goal & G safe)")
sizes = [4, 8, 16, 32, 64]
counts = [model_check(chain(n), phi, "buchi").stats["positions"] for n in sizes]
fit = statistics.linear_regression([math.log(n) for n in sizes], [math.log(c) for c in counts])
print(list(zip(sizes, counts)), "log-log slope %.3f" % fit.slope)
