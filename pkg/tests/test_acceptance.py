"""Acceptance suite: one test per criterion, one printed verdict line each.

Run with plain pytest; the PASS/FAIL lines are written to the real stdout so
they survive capture.  Randomised criteria use fixed seeds.
"""

import random
import sys
import time
from pathlib import Path

import pytest

from gamegen import random_delay, random_gamespec, random_legal_run, random_noisy_run

from cl13.classical import tautology_or_countermodel
from cl13.completeness import floorify, is_good, lift, molecule_context
from cl13.corpus import (
    AND_LIST,
    BLASS,
    CORPUS,
    EXAMPLE_42,
    OR_LIST,
    interpretations_for,
    random_formula,
)
from cl13.formula import classify, elementarize, parse
from cl13.prover import (
    Provable,
    Unprovable,
    check_proof,
    decide_cl13,
    decide_cl14,
    decide_cl14bar,
    read_proof,
)
from cl13.semantics import (
    Interpretation,
    Player,
    interpret,
    legal,
    winner,
    winner_lenient,
)
from cl13.strategy import (
    MinimaxAgent,
    RandomAgent,
    SilentAgent,
    annotate,
    counterwork_agent,
    run_match,
    work_agent,
)

DATA = Path(__file__).parent / "data"
M, E = Player.MACHINE, Player.ENVIRONMENT


def report(name: str, ok: bool, detail: str = ""):
    line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print(line, file=sys.__stdout__, flush=True)
    assert ok, f"{name} failed: {detail}"


def provable(f, system="cl13"):
    decide = {"cl13": decide_cl13, "cl14": decide_cl14, "cl14bar": decide_cl14bar}
    return isinstance(decide[system](f), Provable)


def test_provability_table():
    started = time.time()
    rows = [
        ("~P {0} P", {"|"}),
        ("P {0} Q -> Q {0} P", {"|", "%|", "!|"}),
        ("P {0} P -> P", {"!|"}),
        ("p {0} p -> p", {"|", "%|", "$|", "!|"}),
    ]
    bad = []
    for template, provable_for in rows:
        for token in ("|", "%|", "$|", "!|"):
            source = template.format(token)
            got = provable(parse(source))
            if got != (token in provable_for):
                bad.append(source)
    elapsed = time.time() - started
    report("provability-table", not bad and elapsed < 10.0,
           f"16 cells, {elapsed:.2f}s")


def test_example_42():
    ok_decide = provable(parse(EXAMPLE_42))
    source = (DATA / "example42.proof").read_text()
    ok_file = check_proof(read_proof(source)) == []
    lines = source.splitlines()
    mutations_fail = True
    for drop in range(len(lines)):
        mutated = "\n".join(ln for i, ln in enumerate(lines) if i != drop)
        try:
            root = read_proof(mutated)
        except Exception:
            continue  # unparseable counts as failing the check
        if check_proof(root) == []:
            mutations_fail = False
            break
    # a few targeted semantic mutations on intact structure
    for before, after in [("pick=1", "pick=2"), ("TGD", "ADD"),
                          ("(p | q) | (~p | ~q)", "(p | q) | (~p | q)")]:
        mutated = source.replace(before, after, 1)
        try:
            root = read_proof(mutated)
        except Exception:
            continue
        if check_proof(root) == []:
            mutations_fail = False
            break
    report("example-4.2", ok_decide and ok_file and mutations_fail)


def test_example_43():
    ok_pair = provable(parse("P %& Q -> P $& Q")) and \
        not provable(parse("P $& Q -> P %& Q"))
    provable_count = unprovable_count = 0
    bad = []
    for ops in (AND_LIST, OR_LIST):
        for i, first in enumerate(ops):
            for j, second in enumerate(ops):
                if i == j:
                    continue
                source = f"P {first} Q -> P {second} Q"
                got = provable(parse(source))
                want = i < j
                if got != want:
                    bad.append(source)
                elif want:
                    provable_count += 1
                else:
                    unprovable_count += 1
    report("example-4.3", ok_pair and not bad
           and provable_count == 12 and unprovable_count == 12,
           f"{provable_count} provable + {unprovable_count} unprovable pairs")


def test_exercise_44():
    ok = provable(parse("(~p $| p) & (p $| ~p) -> ~p !| p")) and \
        provable(parse("(~P $| P) & (P $| ~P) -> ~P !| P"))
    report("exercise-4.4", ok)


def test_blass_principle():
    verdict = decide_cl13(parse(BLASS))
    ok = isinstance(verdict, Provable)
    matches = 0
    if ok:
        stack = [verdict.tree]
        while stack:
            node = stack.pop()
            if node.rule == "MATCH":
                matches += 1
            stack.extend(node.premises)
    report("blass-principle", ok and matches == 4, f"{matches} matchings")


def test_duality():
    started = time.time()
    rng = random.Random(2026)
    exceptions = 0
    for _ in range(500):
        f = random_formula(rng, max_connectives=12, atoms=("p", "q", "r", "s"))
        if provable(f, "cl14") == provable(f, "cl14bar"):
            exceptions += 1
    elapsed = time.time() - started
    report("duality", exceptions == 0 and elapsed < 300,
           f"500 formulas, {exceptions} exceptions, {elapsed:.1f}s")


def test_soundness_play():
    losses = 0
    matches = 0
    for entry in CORPUS:
        if not entry.cl13_provable:
            continue
        f = entry.formula
        verdict = decide_cl13(f)
        tree = annotate(verdict.tree, role="machine")
        for itp in interpretations_for(f):
            spec = interpret(f, itp)
            for seed in range(100):
                agent = work_agent(tree)
                env = RandomAgent(E, spec, seed, switch_budget=3)
                result = run_match(spec, agent, env, budget=200)
                matches += 1
                if result.winner is not M:
                    losses += 1
    report("soundness-play", losses == 0, f"{matches} matches, {losses} losses")


def test_counterstrategy():
    cases = failures = 0
    for entry in CORPUS:
        if entry.cl13_provable or not entry.elementary_base:
            continue
        f = entry.formula
        verdict = decide_cl14bar(f)
        assert isinstance(verdict, Provable), entry.name
        tree = annotate(verdict.tree, role="environment")
        names = sorted({*"pqrs"})
        provisional = Interpretation({n: True for n in names}, {})
        spec = interpret(f, provisional)
        machines = [
            lambda: SilentAgent(M),
            lambda: RandomAgent(M, spec, 7, switch_budget=3),
            lambda: RandomAgent(M, spec, 8, switch_budget=3),
            lambda: MinimaxAgent(M, spec, switch_budget=2),
        ]
        for make in machines:
            cases += 1
            agent = counterwork_agent(tree)
            result = run_match(spec, make(), agent, budget=120)
            limit = tree.by_id[result.limit]
            core = elementarize(limit.proof.conclusion)
            model = tautology_or_countermodel(core)
            if limit.rule != "D_TGD" or model is None:
                failures += 1
                continue
            full = {n: model.get(n, False) for n in names}
            eval_spec = interpret(f, Interpretation(full, {}))
            if legal(eval_spec, result.run) is not None or \
                    winner(eval_spec, result.run) is not E:
                failures += 1
    report("counterstrategy", failures == 0 and cases >= 12,
           f"{cases} cases, {failures} failures")


def test_static_closure():
    rng = random.Random(404)
    violations = 0
    for _ in range(1000):
        spec = random_gamespec(rng)
        run = random_legal_run(rng, spec)
        p = winner(spec, run)
        omega = random_delay(rng, run, p)
        if winner_lenient(spec, omega) is not p:
            violations += 1
    report("static-closure", violations == 0, "1000 triples")


def test_illegality_delay():
    rng = random.Random(405)
    violations = 0
    informative = 0
    for _ in range(1000):
        spec = random_gamespec(rng)
        gamma = random_noisy_run(rng, spec)
        p = rng.choice((M, E))
        omega = random_delay(rng, gamma, p)
        verdict_o = legal(spec, omega)
        if verdict_o is not None and verdict_o.offender is p:
            informative += 1
            verdict_g = legal(spec, gamma)
            if verdict_g is None or verdict_g.offender is not p:
                violations += 1
    report("illegality-delay", violations == 0 and informative >= 50,
           f"1000 triples, {informative} informative")


def test_molecule_checks():
    bad = []
    for entry in CORPUS:
        f = entry.formula
        ctx = molecule_context(f)
        lifted = lift(f, ctx)
        if floorify(lifted, ctx) != f:
            bad.append((entry.name, "floor"))
        if not is_good(lifted, ctx).good:
            bad.append((entry.name, "good"))
        if not classify(lifted).is_elementary_base:
            bad.append((entry.name, "base"))
        if not entry.cl13_provable and ctx.m <= 2:
            if not isinstance(decide_cl14(lifted), Unprovable):
                bad.append((entry.name, "lemma"))
    report("molecule-checks", not bad, f"{len(CORPUS)} formulas")


def test_claim_45():
    disagreements = []
    for entry in CORPUS:
        f = entry.formula
        plain = isinstance(decide_cl13(f), Provable)
        pruned = isinstance(decide_cl13(f, claim45_pruning=True), Provable)
        if plain != pruned:
            disagreements.append(entry.name)
    report("claim-4.5", not disagreements, f"{len(CORPUS)} formulas")
