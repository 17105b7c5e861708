# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # Witness strategies with truth-function memory
#
# A winning coalition rarely needs to remember the whole history.  Here the
# memory is a truth function: which relative atoms are already settled true
# or false, and which are still open.  With k atoms there are at most
# 3^k - 2^k such cells that still have an open atom.

# %%
from atlplus import hub, m3, parse_formula
from atlplus.formula import expand_abbreviations
from atlplus.labeling import Labeling
from atlplus.oracle import positional_bruteforce
from atlplus.strategy import witness

model = m3()
f = expand_abbreviations(parse_formula("<<a2>>(G p1 | F p2)"))
rep = witness(model, Labeling(model), f.agents, f.path, "q0")
print(rep.level, rep.memory, "cells, bound", rep.bound, "verified", rep.verified)
print(rep.transducer.dump())

# %% [markdown]
# Some goals do need memory.  At the hub `h` the agent picks the `p` spoke or
# the `q` spoke, and both lead back.  Visiting both is impossible with a
# fixed choice at `h`, but easy once the agent remembers that `p` was seen.

# %%
model = hub()
f = expand_abbreviations(parse_formula("<<a>>(F p & F q)"))
labels = Labeling(model)
print("some positional strategy works:", positional_bruteforce(model, f.agents, f.path, labels, "h"))
rep = witness(model, labels, f.agents, f.path, "h")
print(rep.level, rep.memory, "cells, verified", rep.verified)
for (cell, q), prof in rep.transducer.act.items():
    print(rep.transducer.cells[cell], q, "->", prof)
