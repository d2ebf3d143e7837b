import random
from pathlib import Path

import pytest

from cl13.classical import is_tautology
from cl13.corpus import random_formula, random_mixed_formula
from cl13.formula import classify, parse, text
from cl13.prover import (
    CheckError,
    Provable,
    SearchLimitExceeded,
    Unprovable,
    canonical_key,
    check_proof,
    decide_cl13,
    decide_cl14,
    decide_cl14bar,
    expand_to_tree,
    premises,
    read_proof,
    write_proof,
)

DATA = Path(__file__).parent / "data"


def provable_cl13(source, **kw):
    return isinstance(decide_cl13(parse(source), **kw), Provable)


class TestPremises:
    def test_tgc_empty_expansion(self):
        pset = premises("TGC", parse("(p | q) | (~p | ~q)"))
        assert pset is not None and pset.items == ()

    def test_tgc_requires_stability(self):
        assert premises("TGC", parse("p %| q")) is None

    def test_sqc_adc_senior_and_juniors(self):
        pset = premises("SQC_ADC", parse("(~p %| ~Q) | (p $& Q)"))
        assert text(pset.senior) == "(~p %| 0) | p"
        assert [text(r.result) for r in pset.items] == ["(~p %| ~Q) | Q"]

    def test_tgd_options(self):
        pset = premises("TGD", parse("p %| q"))
        assert sorted(text(r.result) for r in pset.items) == ["p", "q"]

    def test_sqc_adc_rejects_quasielementary(self):
        assert premises("SQC_ADC", parse("p %| q")) is None

    def test_match_pairs(self):
        pset = premises("MATCH", parse("~P | P"))
        assert len(pset.items) == 1
        assert text(pset.items[0].result) == "~_p1 | _p1"

    def test_match_skips_choice_scope(self):
        assert premises("MATCH", parse("~P !| P")) is None

    def test_d_tgd_requires_instability(self):
        assert premises("D_TGD", parse("~p | p")) is None
        pset = premises("D_TGD", parse("~p %| p"))
        assert sorted(text(r.result) for r in pset.items) == ["p", "~p"]


class TestDecideCL13:
    def test_example_42(self):
        assert provable_cl13("((p %& ~p) | (q %& ~q)) | ((~p | ~q) %| (p & q))")

    def test_example_43_pair(self):
        assert provable_cl13("P %& Q -> P $& Q")
        assert not provable_cl13("P $& Q -> P %& Q")

    def test_constants(self):
        assert provable_cl13("1")
        assert not provable_cl13("0")

    def test_table_row_one(self):
        assert provable_cl13("~P | P")
        assert not provable_cl13("~P %| P")
        assert not provable_cl13("~P $| P")
        assert not provable_cl13("~P !| P")

    def test_exercise_44(self):
        assert provable_cl13("(~p $| p) & (p $| ~p) -> ~p !| p")
        assert provable_cl13("(~P $| P) & (P $| ~P) -> ~P !| P")

    def test_blass(self):
        assert provable_cl13("((~P | ~Q) & (~R | ~S)) | ((P | R) & (Q | S))")

    def test_proof_tree_checks(self):
        verdict = decide_cl13(parse("P %& Q -> P $& Q"))
        assert isinstance(verdict, Provable)
        assert check_proof(verdict.tree) == []
        assert verdict.tree.conclusion == parse("P %& Q -> P $& Q")

    def test_budget_exceeded_is_distinct(self):
        with pytest.raises(SearchLimitExceeded):
            decide_cl13(parse("((~P | ~Q) & (~R | ~S)) | ((P | R) & (Q | S))"), budget=3)

    def test_claim45_pruning_spot_agreement(self):
        for source in ["P %& Q -> P $& Q", "P $& Q -> P %& Q", "~P $| P",
                       "(~p $| p) & (p $| ~p) -> ~p !| p"]:
            a = isinstance(decide_cl13(parse(source)), Provable)
            b = isinstance(decide_cl13(parse(source), claim45_pruning=True), Provable)
            assert a == b, source


class TestDecideCL14:
    def test_requires_elementary_base(self):
        with pytest.raises(ValueError):
            decide_cl14(parse("~P | P"))

    def test_examples(self):
        assert isinstance(decide_cl14(parse("~p | p")), Provable)
        assert isinstance(decide_cl14(parse("~p %| p")), Unprovable)
        assert isinstance(
            decide_cl14(parse("(~p $| p) & (p $| ~p) -> ~p !| p")), Provable
        )

    def test_dual_examples(self):
        assert isinstance(decide_cl14bar(parse("~p %| p")), Provable)
        assert isinstance(decide_cl14bar(parse("~p | p")), Unprovable)
        assert isinstance(decide_cl14bar(parse("0")), Provable)

    def test_dual_proofs_check(self):
        verdict = decide_cl14bar(parse("~p %| p"))
        assert check_proof(verdict.tree) == []

    def test_duality_on_random_sample(self):
        rng = random.Random(42)
        for _ in range(60):
            f = random_formula(rng, max_connectives=6)
            a = isinstance(decide_cl14(f), Provable)
            b = isinstance(decide_cl14bar(f), Provable)
            assert a != b, text(f)

    def test_conservativity_on_random_elementary(self):
        rng = random.Random(43)
        for _ in range(60):
            f = random_formula(rng, max_connectives=6)
            if not classify(f).is_elementary:
                continue
            assert isinstance(decide_cl13(f), Provable) == is_tautology(f), text(f)

    def test_modus_ponens_closure_on_corpus_subset(self):
        from cl13.corpus import CORPUS
        from cl13.formula import Nary, negate

        entries = [e for e in CORPUS
                   if e.name.startswith("table") or len(e.source) < 30]
        verdicts = {e.name: isinstance(decide_cl13(e.formula), Provable)
                    for e in entries}
        for a in entries:
            if not verdicts[a.name]:
                continue
            for b in entries:
                impl = Nary("|", (negate(a.formula), b.formula))
                if isinstance(decide_cl13(impl), Provable):
                    assert verdicts[b.name], (a.name, b.name)


class TestTerminationMeasure:
    def test_premises_shrink_lexicographic_measure(self):
        from cl13.formula import Lit, iter_nodes
        from cl13.prover import RULES_CL13, RULES_DUAL, premises

        def measure(f):
            nodes = list(iter_nodes(f))
            generals = sum(1 for _, n in nodes
                           if isinstance(n, Lit) and n.atom.kind == "general")
            return (generals, len(nodes))

        rng = random.Random(77)
        for _ in range(150):
            f = random_mixed_formula(rng, max_connectives=6)
            base = measure(f)
            for rule in RULES_CL13 + RULES_DUAL:
                pset = premises(rule, f)
                if pset is None:
                    continue
                results = [r.result for r in pset.items]
                if pset.senior is not None:
                    results.append(pset.senior)
                for g in results:
                    assert measure(g) < base, (rule, text(f), text(g))


class TestCheckProof:
    def test_example_42_transcription(self):
        root = read_proof((DATA / "example42.proof").read_text())
        assert check_proof(root) == []
        assert root.conclusion == parse(
            "((p %& ~p) | (q %& ~q)) | ((~p | ~q) %| (p & q))"
        )

    def test_missing_premise_detected(self):
        source = (DATA / "example42.proof").read_text()
        mutated = source.replace("5,10,11,12", "10,11,12")
        root = read_proof(mutated)
        errors = check_proof(root)
        assert any(e.node_id == 13 for e in errors)

    def test_wrong_pick_detected(self):
        source = (DATA / "example42.proof").read_text()
        mutated = source.replace("| TGD | 8 | path=2 pick=2", "| TGD | 8 | path=2 pick=1")
        errors = check_proof(read_proof(mutated))
        assert any(e.node_id == 9 for e in errors)

    def test_match_fresh_in_conclusion_rejected(self):
        tree = decide_cl13(parse("(~P | P) | p")).tree
        # find the MATCH node and force its fresh atom to clash with p
        def find(node):
            if node.rule == "MATCH":
                return node
            for kid in node.premises:
                hit = find(kid)
                if hit:
                    return hit
        m = find(tree)
        assert m is not None
        good = write_proof(tree)
        bad = good.replace(m.aux["fresh"], "p")
        errors = check_proof(read_proof(bad))
        assert errors

    def test_match_fresh_reuse_rejected(self):
        tree = decide_cl13(parse("(~P | P) & (~Q | Q)")).tree
        matches = []

        def collect(node):
            if node.rule == "MATCH":
                matches.append(node)
            for kid in node.premises:
                collect(kid)

        collect(tree)
        assert len(matches) >= 2
        assert check_proof(tree) == []
        text_good = write_proof(tree)
        a, b = matches[0].aux["fresh"], matches[1].aux["fresh"]
        bad = text_good.replace(b, a)
        errors = check_proof(read_proof(bad))
        assert errors


class TestProofFiles:
    def test_round_trip(self):
        for source in ["P %& Q -> P $& Q", "~P | P", "p !| p -> p"]:
            tree = decide_cl13(parse(source)).tree
            dumped = write_proof(tree)
            loaded = read_proof(dumped)
            assert check_proof(loaded) == []
            assert loaded.conclusion == parse(source)

    def test_expand_to_tree_unique_ids(self):
        root = read_proof((DATA / "example42.proof").read_text())
        tree = expand_to_tree(root)
        ids = []

        def collect(node):
            ids.append(node.id)
            for kid in node.premises:
                collect(kid)

        collect(tree)
        assert len(ids) == len(set(ids))
        assert check_proof(tree) == []


class TestRandomProofsCheck:
    def test_cl13_output_always_checks(self):
        rng = random.Random(99)
        for _ in range(40):
            f = random_mixed_formula(rng, max_connectives=5)
            verdict = decide_cl13(f, budget=200_000)
            if isinstance(verdict, Provable):
                assert check_proof(verdict.tree) == [], text(f)


class TestCanonicalKey:
    def test_pseudo_renaming_merges(self):
        a = parse("~_p3 | _p3")
        b = parse("~_p9 | _p9")
        assert canonical_key(a) == canonical_key(b)

    def test_distinct_pseudos_stay_distinct(self):
        a = parse("~_p1 | _p2")
        b = parse("~_p1 | _p1")
        assert canonical_key(a) != canonical_key(b)
