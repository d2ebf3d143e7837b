"""Classical evaluation, brute-force tautology checking and stability."""

from __future__ import annotations

import itertools
from typing import Optional

from cl13.formula import (
    PAR_AND,
    Bot,
    Formula,
    Lit,
    Nary,
    Top,
    atom_names,
    classify,
    elementarize,
)

# A model is a total true/false assignment for elementary atom names.
Model = dict[str, bool]

DEFAULT_ATOM_BOUND = 24


class AtomBoundExceeded(RuntimeError):
    pass


def eval_formula(f: Formula, model: Model) -> bool:
    """Classical truth value of an elementary formula under a model."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Lit):
        if f.atom.kind != "elementary":
            raise ValueError(f"general atom {f.atom.name} in classical eval")
        if f.atom.name not in model:
            raise KeyError(f"model does not cover atom {f.atom.name}")
        value = model[f.atom.name]
        return not value if f.negated else value
    if isinstance(f, Nary):
        if f.kind == PAR_AND:
            return all(eval_formula(c, model) for c in f.children)
        if f.kind == "|":
            return any(eval_formula(c, model) for c in f.children)
    raise ValueError("eval needs an elementary formula")


def tautology_or_countermodel(
    f: Formula, atom_bound: int = DEFAULT_ATOM_BOUND
) -> Optional[Model]:
    """None if f is a tautology, else the lexicographically first countermodel."""
    if not classify(f).is_elementary:
        raise ValueError("tautology check needs an elementary formula")
    names = sorted(atom_names(f))
    if len(names) > atom_bound:
        raise AtomBoundExceeded(f"{len(names)} atoms exceed bound {atom_bound}")
    for values in itertools.product((False, True), repeat=len(names)):
        model = dict(zip(names, values))
        if not eval_formula(f, model):
            return model
    return None


def is_tautology(f: Formula) -> bool:
    return tautology_or_countermodel(f) is None


def is_stable(f: Formula) -> bool:
    """A quasielementary formula is stable iff its elementarization is a tautology."""
    return is_tautology(elementarize(f))
