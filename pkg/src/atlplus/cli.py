"""Command line front end: check, witness, report and fuzz."""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import yaml

from .arena import build_transition_arena
from .bounded import BoundedSolver, TimerPolicy, stable_timer
from .buchi import ELOISE, solve_buchi
from .cgm import BUILTIN_MODELS, ModelError, builtin_model, dump_model, load_model
from .checker import ENGINES, cross_validate, model_check, random_instance
from .formula import (Coalition, ParseError, expand_abbreviations, fragment_width,
                      parse_formula, to_text)
from .labeling import Labeling
from .strategy import memory_bound, synthesize_transducer

EXIT_OK, EXIT_INPUT, EXIT_FALSE, EXIT_BROKEN = 0, 2, 3, 4
JOBS_ENV = "ATLPLUS_JOBS"


class InputError(Exception):
    pass


def _model(arg: str):
    if arg in BUILTIN_MODELS and not Path(arg).exists():
        return builtin_model(arg)
    path = Path(arg)
    if not path.is_file():
        raise InputError(f"model {arg!r} is neither a file nor a built-in model "
                         f"({', '.join(BUILTIN_MODELS)})")
    return load_model(path)


def _formula(arg: str):
    path = Path(arg)
    text = path.read_text(encoding="utf-8").strip() if path.is_file() else arg
    return parse_formula(text)


def _states(model, state):
    if state is None:
        return list(model.states)
    if state not in model.state_index:
        raise InputError(f"unknown state {state!r}")
    return [state]


def _emit(args, doc: dict, human: str) -> None:
    if args.format == "json":
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(human)


def cmd_check(args) -> int:
    model = _model(args.model)
    phi = _formula(args.formula)
    states = _states(model, args.state)
    if args.timer is not None and args.timer < 1:
        raise InputError("--timer must be at least 1")
    model.ordered(a for sub in fragment_width(phi).subformulas for a in sub.agents)
    verdict = model_check(model, phi, args.engine, timer=args.timer, policy=args.policy)
    doc = verdict.to_document()
    doc["per_state"] = {q: verdict.per_state[q] for q in states}
    lines = [f"formula: {verdict.formula}", f"engine: {verdict.engine}"]
    lines += [f"{q}: {'true' if verdict.per_state[q] else 'false'}" for q in states]
    stats = " ".join(f"{k}={v}" for k, v in sorted(doc["stats"].items()))
    lines.append(f"stats: {stats} seconds={verdict.stats['seconds']:.3f}")
    _emit(args, doc, "\n".join(lines) + "\n")
    if args.fail_on_false and not all(verdict.per_state[q] for q in states):
        return EXIT_FALSE
    return EXIT_OK


def cmd_witness(args) -> int:
    model = _model(args.model)
    phi = expand_abbreviations(_formula(args.formula))
    if not isinstance(phi, Coalition):
        raise InputError("witness needs a formula of the form <<A>> path")
    (state,) = _states(model, args.state)
    inner = model_check(model, phi, "buchi")
    labels = inner.labels
    arena = build_transition_arena(model, labels, phi.agents, phi.path)
    sol = solve_buchi(arena.graph())
    if sol.winner[arena.initial[state]] != ELOISE:
        sys.stderr.write(f"{to_text(phi)} is false at {state}; no witness\n")
        return EXIT_FALSE
    report = synthesize_transducer(arena, sol, state)
    text = report.transducer.dump()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    doc = {"formula": to_text(phi), "state": state, "verified": report.verified,
           "level": report.level, "memory": report.memory, "bound": report.bound}
    human = (f"witness for {to_text(phi)} at {state}: level {report.level}, "
             f"{report.memory} memory cells (bound {report.bound}), "
             f"{'verified' if report.verified else 'VERIFICATION FAILED'}\n")
    if not args.out:
        human += text
        doc["transducer"] = report.transducer.to_document()
    _emit(args, doc, human)
    return EXIT_OK if report.verified else EXIT_BROKEN


def cmd_report(args) -> int:
    model = _model(args.model)
    phi = expand_abbreviations(_formula(args.formula))
    rep = fragment_width(phi)
    labels = Labeling(model)
    subs = []
    for sub in rep.subformulas:
        arena = build_transition_arena(model, labels, sub.agents, sub.path)
        sol = solve_buchi(arena.graph())
        labels.set(sub, {q for q, i in arena.initial.items() if sol.winner[i] == ELOISE})
        k = rep.atom_counts[sub]
        subs.append({"formula": to_text(sub), "atoms": k,
                     "temporal_atoms": rep.temporal_counts[sub],
                     "stable_timer": stable_timer(model, sub.path),
                     "memory_bound": memory_bound(k),
                     "arena_positions": len(arena), "arena_edges": arena.edge_count})
    bounded = BoundedSolver(model, None, TimerPolicy.CANONICAL_MAX, memoize=True)
    for q in model.states:
        bounded.wins(phi, q)
    doc = {"formula": to_text(phi), "states": len(model.states), "width": rep.width,
           "subformulas": subs, "bounded_positions": len(bounded.memo) if subs else 0}
    lines = [f"formula: {to_text(phi)}", f"width: {rep.width}"]
    if not subs:
        lines.append("no coalition subformulas; no arenas")
    for s in subs:
        lines.append(f"{s['formula']}: atoms={s['atoms']} temporal={s['temporal_atoms']} "
                     f"stable_timer={s['stable_timer']} memory_bound={s['memory_bound']} "
                     f"arena_positions={s['arena_positions']}")
    if subs:
        lines.append(f"bounded search positions: {doc['bounded_positions']}")
    _emit(args, doc, "\n".join(lines) + "\n")
    return EXIT_OK


def _fuzz_one(seed: int):
    model, phi = random_instance(seed)
    report = cross_validate(model, phi)
    return seed, report.to_document(), (dump_model(model), to_text(phi))


def cmd_fuzz(args) -> int:
    if args.count < 1:
        raise InputError("--count must be at least 1")
    jobs = args.jobs if args.jobs is not None else int(os.environ.get(JOBS_ENV, "1"))
    seeds = range(args.seed, args.seed + args.count)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_fuzz_one, seeds))
    else:
        results = [_fuzz_one(s) for s in seeds]
    bad = []
    for seed, doc, (model_text, formula_text) in results:
        if not doc["disagreements"]:
            continue
        bad.append({"seed": seed, **doc})
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            repro = doc["disagreements"][-1].get("reproducer")
            if repro:
                model_text = yaml.safe_dump(repro["model"], sort_keys=False)
                formula_text = repro["formula"]
            (out / f"seed{seed}.model.yaml").write_text(model_text, encoding="utf-8")
            (out / f"seed{seed}.formula").write_text(formula_text + "\n", encoding="utf-8")
    doc = {"seed": args.seed, "count": args.count, "disagreements": len(bad),
           "failures": bad}
    human = f"fuzz seeds {args.seed}..{args.seed + args.count - 1}: {len(bad)} disagreement(s)\n"
    for b in bad:
        human += f"  seed {b['seed']}: {b['formula']}\n"
    _emit(args, doc, human)
    return EXIT_OK if not bad else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="atlplus", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, state=True):
        sp.add_argument("--model", required=True,
                        help="model file, or a built-in name: " + ", ".join(BUILTIN_MODELS))
        sp.add_argument("--formula", required=True, help="formula text or a file holding it")
        if state:
            sp.add_argument("--state", help="state to report (default: all)")
        sp.add_argument("--format", choices=("human", "json"), default="human")

    c = sub.add_parser("check", help="model check a formula")
    common(c)
    c.add_argument("--engine", choices=ENGINES)
    c.add_argument("--timer", type=int, help="timer bound for the bounded engine")
    c.add_argument("--policy", choices=[x.value for x in TimerPolicy],
                   default=TimerPolicy.CANONICAL_MAX.value)
    c.add_argument("--fail-on-false", action="store_true",
                   help="exit 3 when the formula is false at a reported state")
    c.set_defaults(func=cmd_check)

    w = sub.add_parser("witness", help="emit a finite-memory witness strategy")
    common(w, state=False)
    w.add_argument("--state", required=True)
    w.add_argument("--out", help="write the witness file here")
    w.set_defaults(func=cmd_witness)

    r = sub.add_parser("report", help="fragment width, timers and arena sizes")
    common(r, state=False)
    r.set_defaults(func=cmd_report)

    f = sub.add_parser("fuzz", help="cross-validate engines on random instances")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--count", type=int, default=100)
    f.add_argument("--jobs", type=int, help=f"worker processes (default: ${JOBS_ENV} or 1)")
    f.add_argument("--out", help="directory for reproducers of disagreements")
    f.add_argument("--format", choices=("human", "json"), default="human")
    f.set_defaults(func=cmd_fuzz)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ParseError, ModelError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
