"""Molecule atoms, the lift into the elementary-base language, floorification
and the goodness predicate.

A general atom P is expanded into a choice-of-choices over fresh elementary
atoms.  Molecule membership is tracked by tags placed at construction, so
"independent occurrence" stays exact even when user formulas happen to look
like molecules.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional

from cl13.formula import (
    CHO_AND,
    CHO_OR,
    Atom,
    Formula,
    Lit,
    MolTag,
    Nary,
    Path,
    atom_names,
    iter_nodes,
    negate,
    occurrences,
    replace_at,
)


@dataclass(frozen=True)
class MoleculeContext:
    m: int
    generals: tuple[str, ...]

    def small_name(self, p: str, a: int, b: int) -> str:
        return f"{p}{a}{b}"

    def small_names(self) -> set[str]:
        return {
            self.small_name(p, a, b)
            for p in self.generals
            for a in range(1, self.m + 1)
            for b in range(1, self.m + 1)
        }

    def decode_small(self, name: str) -> Optional[tuple[str, int, int]]:
        for p in self.generals:
            if name.startswith(p) and len(name) == len(p) + 2:
                a, b = name[len(p)], name[len(p) + 1]
                if a.isdigit() and b.isdigit() and 1 <= int(a) <= self.m \
                        and 1 <= int(b) <= self.m:
                    return p, int(a), int(b)
        return None

    def small(self, p: str, a: int, b: int, negated: bool = False) -> Lit:
        return Lit(Atom(self.small_name(p, a, b), "elementary"), negated)

    def medium(self, p: str, a: int) -> Nary:
        kids = tuple(self.small(p, a, b) for b in range(1, self.m + 1))
        return Nary(CHO_OR, kids, mol=MolTag("medium", p, a, False))

    def large(self, p: str) -> Nary:
        kids = tuple(self.medium(p, a) for a in range(1, self.m + 1))
        return Nary(CHO_AND, kids, mol=MolTag("large", p, None, False))


def molecule_context(f: Formula) -> MoleculeContext:
    """m is the number of general-atom occurrences in f, at least 2."""
    count = sum(
        1 for _, node in iter_nodes(f)
        if isinstance(node, Lit) and node.atom.kind == "general"
    )
    generals = tuple(sorted(atom_names(f, "general")))
    ctx = MoleculeContext(max(2, count), generals)
    clash = ctx.small_names() & atom_names(f)
    if clash:
        raise ValueError(f"molecule atom names already used: {sorted(clash)}")
    return ctx


def lift(f: Formula, ctx: MoleculeContext) -> Formula:
    """Replace every general-atom occurrence by the large molecule."""
    if isinstance(f, Lit) and f.atom.kind == "general":
        big = ctx.large(f.atom.name)
        return negate(big) if f.negated else big
    if isinstance(f, Nary):
        return Nary(f.kind, tuple(lift(c, ctx) for c in f.children), mol=f.mol)
    return f


@dataclass(frozen=True)
class MolOccurrence:
    path: Path
    size: str            # "small" | "medium" | "large"
    origin: str
    sup: Optional[int]   # a, for small/medium
    sub: Optional[int]   # b, for small
    negated: bool


def independent_occurrences(e: Formula, ctx: MoleculeContext) -> list[MolOccurrence]:
    """Molecule occurrences that are not part of a larger tagged molecule."""
    out: list[MolOccurrence] = []

    def walk(node: Formula, path: Path):
        tag = getattr(node, "mol", None)
        if isinstance(node, Nary) and tag is not None:
            out.append(MolOccurrence(path, tag.size, tag.origin, tag.sup,
                                     None, tag.negated))
            return  # everything inside is non-independent
        if isinstance(node, Lit):
            decoded = ctx.decode_small(node.atom.name)
            if decoded is not None:
                p, a, b = decoded
                out.append(MolOccurrence(path, "small", p, a, b, node.negated))
            return
        if isinstance(node, Nary):
            for i, child in enumerate(node.children, 1):
                walk(child, path + (i,))

    walk(e, ())
    return out


def floorify(e: Formula, ctx: MoleculeContext) -> Formula:
    """Map large, medium and isolated small molecules back to general literals."""
    occs = independent_occurrences(e, ctx)
    small_counts = Counter(
        (o.origin, o.sup, o.sub) for o in occs if o.size == "small"
    )
    result = e
    for occ in sorted(occs, key=lambda o: o.path, reverse=True):
        if occ.size == "small" and small_counts[(occ.origin, occ.sup, occ.sub)] != 1:
            continue  # not isolated
        lit = Lit(Atom(occ.origin, "general"), occ.negated)
        result = replace_at(result, occ.path, lit)
    return result


@dataclass(frozen=True)
class GoodnessReport:
    good: bool
    violated: tuple[str, ...]  # subset of ("i", "ii", "iii", "iv")


def is_good(e: Formula, ctx: MoleculeContext) -> GoodnessReport:
    """The four structural conditions independent molecule occurrences must meet."""
    occs = independent_occurrences(e, ctx)
    violated = []
    if len(occs) > ctx.m:
        violated.append("i")
    semisurface = {p for p, _, _ in occurrences(e, "semisurface")}
    if any(o.path not in semisurface for o in occs if o.size != "large"):
        violated.append("ii")
    small_signed = Counter(
        (o.origin, o.sup, o.sub, o.negated) for o in occs if o.size == "small"
    )
    if any(c > 1 for c in small_signed.values()):
        violated.append("iii")
    pos_medium = Counter(
        (o.origin, o.sup) for o in occs if o.size == "medium" and not o.negated
    )
    pos_small_keys = {
        (o.origin, o.sup) for o in occs if o.size == "small" and not o.negated
    }
    if any(c > 1 for c in pos_medium.values()) or \
            any(key in pos_small_keys for key in pos_medium):
        violated.append("iv")
    return GoodnessReport(not violated, tuple(violated))
