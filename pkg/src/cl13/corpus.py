"""Curated formula corpus with expected verdicts, plus random generators.

The corpus collects the worked examples and the provability table that the
acceptance suite reproduces; property tests sample the random generators.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from cl13.formula import (
    KINDS,
    Atom,
    Bot,
    Formula,
    Lit,
    Nary,
    Top,
    classify,
    parse,
    text,
)


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    source: str
    cl13_provable: bool

    @property
    def formula(self) -> Formula:
        return parse(self.source)

    @property
    def elementary_base(self) -> bool:
        return classify(self.formula).is_elementary_base


def _table_entries() -> list[CorpusEntry]:
    ors = [("|", "par"), ("%|", "tog"), ("$|", "seq"), ("!|", "cho")]
    rows = [
        ("~P {0} P", {"par"}),
        ("P {0} Q -> Q {0} P", {"par", "tog", "cho"}),
        ("P {0} P -> P", {"cho"}),
        ("p {0} p -> p", {"par", "tog", "seq", "cho"}),
    ]
    out = []
    for template, provable_for in rows:
        for token, family in ors:
            source = template.format(token)
            out.append(CorpusEntry(
                f"table[{template.format('OR')} @ {token}]",
                source,
                family in provable_for,
            ))
    return out


# Left-to-right orderings: P AND1 Q -> P AND2 Q holds iff AND1 is left of
# AND2; dually for the disjunction list.
AND_LIST = ["&", "%&", "$&", "!&"]
OR_LIST = ["!|", "$|", "%|", "|"]


def _ordering_entries() -> list[CorpusEntry]:
    out = []
    for ops in (AND_LIST, OR_LIST):
        for i, first in enumerate(ops):
            for j, second in enumerate(ops):
                if i == j:
                    continue
                source = f"P {first} Q -> P {second} Q"
                out.append(CorpusEntry(f"order[{first} -> {second}]", source, i < j))
    return out


EXAMPLE_42 = "((p %& ~p) | (q %& ~q)) | ((~p | ~q) %| (p & q))"
EXERCISE_44_ELDEMENTARY = "(~p $| p) & (p $| ~p) -> ~p !| p"
EXERCISE_44_GENERAL = "(~P $| P) & (P $| ~P) -> ~P !| P"
BLASS = "((~P | ~Q) & (~R | ~S)) | ((P | R) & (Q | S))"


def _named_entries() -> list[CorpusEntry]:
    return [
        CorpusEntry("example-4.2", EXAMPLE_42, True),
        CorpusEntry("exercise-4.4-elementary", EXERCISE_44_ELDEMENTARY, True),
        CorpusEntry("exercise-4.4-general", EXERCISE_44_GENERAL, True),
        CorpusEntry("blass", BLASS, True),
        CorpusEntry("top", "1", True),
        CorpusEntry("bot", "0", False),
        CorpusEntry("excluded-middle", "~p | p", True),
        CorpusEntry("toggled-middle", "~p %| p", False),
        CorpusEntry("seq-middle", "~p $| p", False),
        CorpusEntry("choice-middle", "~p !| p", False),
        CorpusEntry("seq-conj-intro", "(~p $| p) & (~q $| q) -> ~(p & q) $| (p & q)", True),
    ]


CORPUS: list[CorpusEntry] = _table_entries() + _ordering_entries() + _named_entries()


def corpus_by_name(name: str) -> CorpusEntry:
    for entry in CORPUS:
        if entry.name == name:
            return entry
    raise KeyError(name)


# ---------------------------------------------------------------------------
# Random generators

def random_formula(
    rng: random.Random,
    max_connectives: int = 12,
    atoms: tuple[str, ...] = ("p", "q", "r", "s"),
    elementary_base: bool = True,
    const_weight: float = 0.1,
) -> Formula:
    """A random formula with at most `max_connectives` connective nodes."""
    budget = rng.randint(0, max_connectives)

    def gen(budget: int) -> tuple[Formula, int]:
        if budget <= 0 or rng.random() < 0.25:
            if rng.random() < const_weight:
                return (Top() if rng.random() < 0.5 else Bot()), budget
            name = rng.choice(atoms)
            kind = "general" if name[0].isupper() else "elementary"
            return Lit(Atom(name, kind), rng.random() < 0.5), budget
        budget -= 1
        n = 2 if rng.random() < 0.7 else 3
        kids = []
        for _ in range(n):
            kid, budget = gen(budget)
            kids.append(kid)
        return Nary(rng.choice(KINDS), tuple(kids)), budget

    f, _ = gen(budget)
    if elementary_base:
        assert classify(f).is_elementary_base
    return f


def random_mixed_formula(rng: random.Random, max_connectives: int = 8) -> Formula:
    """Random formula over both elementary and general atoms."""
    return random_formula(
        rng, max_connectives, atoms=("p", "q", "P", "Q"), elementary_base=False
    )


# Three fixed molecule-shaped games for general atoms.
MOLECULE_VARIANTS = [
    [[True, True], [True, True]],
    [[False, False], [False, False]],
    [[True, False], [False, True]],
]


def interpretations_for(f: Formula):
    """Every boolean assignment of the elementary atoms, crossed with the
    molecule-shaped bindings for general atoms."""
    import itertools

    from cl13.formula import atom_names
    from cl13.semantics import Interpretation, molecule_spec

    elem_names = sorted(atom_names(f, "elementary"))
    gen_names = sorted(atom_names(f, "general"))
    out = []
    for values in itertools.product((False, True), repeat=len(elem_names)):
        elem = dict(zip(elem_names, values))
        if gen_names:
            for variant in MOLECULE_VARIANTS:
                gen = {n: molecule_spec(variant) for n in gen_names}
                out.append(Interpretation(elem, gen))
        else:
            out.append(Interpretation(elem, {}))
    return out


__all__ = [
    "CORPUS",
    "CorpusEntry",
    "EXAMPLE_42",
    "BLASS",
    "corpus_by_name",
    "random_formula",
    "random_mixed_formula",
    "text",
]
