"""Formula AST, concrete syntax and the basic structural transforms.

Formulas are kept in negation normal form: negation appears only on atoms,
implication is desugared at parse time.  The eight binary-or-wider
connectives are genuinely n-ary; a parenthesised group stays a nested node
because nesting and flattening are not interchangeable here.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace as dc_replace
from typing import Callable, Iterator, Optional, Union

# Connective kinds, identified by their source tokens.
PAR_AND = "&"
PAR_OR = "|"
TOG_AND = "%&"
TOG_OR = "%|"
SEQ_AND = "$&"
SEQ_OR = "$|"
CHO_AND = "!&"
CHO_OR = "!|"

KINDS = (PAR_AND, PAR_OR, TOG_AND, TOG_OR, SEQ_AND, SEQ_OR, CHO_AND, CHO_OR)

DUAL_KIND = {
    PAR_AND: PAR_OR, PAR_OR: PAR_AND,
    TOG_AND: TOG_OR, TOG_OR: TOG_AND,
    SEQ_AND: SEQ_OR, SEQ_OR: SEQ_AND,
    CHO_AND: CHO_OR, CHO_OR: CHO_AND,
}

FAMILY = {
    PAR_AND: "par", PAR_OR: "par",
    TOG_AND: "tog", TOG_OR: "tog",
    SEQ_AND: "seq", SEQ_OR: "seq",
    CHO_AND: "cho", CHO_OR: "cho",
}

AND_KINDS = frozenset({PAR_AND, TOG_AND, SEQ_AND, CHO_AND})

# A path addresses a subformula occurrence by 1-based child indices.
Path = tuple[int, ...]


class ParseError(ValueError):
    """Raised on malformed formula text."""


@dataclass(frozen=True)
class MolTag:
    """Marks a subtree as a molecule occurrence (used by the completeness kit)."""

    size: str        # "medium" | "large"
    origin: str      # name of the general atom the molecule stands for
    sup: Optional[int]
    negated: bool

    def flip(self) -> "MolTag":
        return dc_replace(self, negated=not self.negated)


@dataclass(frozen=True)
class Atom:
    name: str
    kind: str  # "elementary" | "general"
    pseudo: bool = False

    def __post_init__(self):
        if self.kind not in ("elementary", "general"):
            raise ValueError(f"bad atom kind {self.kind!r}")
        if self.pseudo and self.kind != "elementary":
            raise ValueError("pseudo atoms are always elementary")


def make_atom(name: str) -> Atom:
    """Classify an identifier: uppercase first letter = general atom."""
    if not name:
        raise ParseError("empty atom name")
    first = name[0]
    if first.isupper():
        return Atom(name, "general")
    if first.islower() or first == "_":
        return Atom(name, "elementary", pseudo=first == "_")
    raise ParseError(f"bad atom name {name!r}")


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Lit:
    atom: Atom
    negated: bool = False
    mol: Optional[MolTag] = field(default=None, compare=False)


@dataclass(frozen=True)
class Nary:
    kind: str
    children: tuple["Formula", ...]
    mol: Optional[MolTag] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"bad connective kind {self.kind!r}")
        if len(self.children) < 2:
            raise ValueError("n-ary connectives need at least 2 children")


Formula = Union[Top, Bot, Lit, Nary]

TOP = Top()
BOT = Bot()


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"\s*(->|%&|%\||\$&|\$\||!&|!\||[&|~()]|[A-Za-z_][A-Za-z0-9_]*|[0-9]+)"
)


def _tokenize(source: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if not m:
            rest = source[pos:].lstrip()
            if not rest:
                break
            raise ParseError(f"lexical error at {rest[:10]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        self.pos += 1
        return tok

    def expect(self, tok: str):
        got = self.take()
        if got != tok:
            raise ParseError(f"expected {tok!r}, found {got!r}")

    def parse_formula(self) -> Formula:
        left = self.parse_level()
        if self.peek() == "->":
            self.take()
            right = self.parse_formula()  # right-associative
            return Nary(PAR_OR, (negate(left), right))
        return left

    def parse_level(self) -> Formula:
        items = [self.parse_unit()]
        op = None
        while self.peek() in KINDS:
            tok = self.take()
            if op is None:
                op = tok
            elif tok != op:
                raise ParseError(
                    f"mixed connectives {op!r} and {tok!r} need parentheses"
                )
            items.append(self.parse_unit())
        if op is None:
            return items[0]
        return Nary(op, tuple(items))

    def parse_unit(self) -> Formula:
        tok = self.take()
        if tok == "~":
            return negate(self.parse_unit())
        if tok == "(":
            inner = self.parse_formula()
            self.expect(")")
            return inner
        if tok == "1":
            return TOP
        if tok == "0":
            return BOT
        if tok.isdigit():
            raise ParseError(f"bad constant {tok!r} (only 1 and 0)")
        if tok in KINDS or tok in ("->", ")"):
            raise ParseError(f"unexpected token {tok!r}")
        return Lit(make_atom(tok))


def parse(source: str) -> Formula:
    """Parse formula text into a negation-normal AST."""
    parser = _Parser(_tokenize(source))
    result = parser.parse_formula()
    if parser.peek() is not None:
        raise ParseError(f"trailing input at {parser.peek()!r}")
    return result


# ---------------------------------------------------------------------------
# Printing

def text(f: Formula) -> str:
    """Canonical text; reparsing it yields an identical formula."""
    if isinstance(f, Top):
        return "1"
    if isinstance(f, Bot):
        return "0"
    if isinstance(f, Lit):
        return ("~" if f.negated else "") + f.atom.name
    parts = []
    for child in f.children:
        part = text(child)
        if isinstance(child, Nary):
            part = f"({part})"
        parts.append(part)
    return f" {f.kind} ".join(parts)


# ---------------------------------------------------------------------------
# Structural operations

def negate(f: Formula) -> Formula:
    """De Morgan dual in negation normal form; an involution."""
    if isinstance(f, Top):
        return BOT
    if isinstance(f, Bot):
        return TOP
    if isinstance(f, Lit):
        return Lit(f.atom, not f.negated, mol=f.mol.flip() if f.mol else None)
    return Nary(
        DUAL_KIND[f.kind],
        tuple(negate(c) for c in f.children),
        mol=f.mol.flip() if f.mol else None,
    )


@dataclass(frozen=True)
class FormulaClass:
    is_elementary: bool
    is_quasielementary: bool
    is_elementary_base: bool


def classify(f: Formula) -> FormulaClass:
    families = set()
    has_general = False
    for _, node, _ in occurrences(f, "all"):
        if isinstance(node, Lit) and node.atom.kind == "general":
            has_general = True
        elif isinstance(node, Nary):
            families.add(FAMILY[node.kind])
    quasi = not has_general and families <= {"par", "tog"}
    elem = not has_general and families <= {"par"}
    return FormulaClass(elem, quasi, not has_general)


def subformula_at(f: Formula, path: Path) -> Formula:
    node = f
    for step in path:
        if not isinstance(node, Nary) or not 1 <= step <= len(node.children):
            raise ValueError(f"invalid path {path}")
        node = node.children[step - 1]
    return node


def replace_at(f: Formula, path: Path, g: Formula) -> Formula:
    """Replace the subtree at `path` by `g`."""
    if not path:
        return g
    if not isinstance(f, Nary) or not 1 <= path[0] <= len(f.children):
        raise ValueError(f"invalid path {path}")
    i = path[0] - 1
    children = list(f.children)
    children[i] = replace_at(children[i], path[1:], g)
    return Nary(f.kind, tuple(children), mol=f.mol)


def occurrences(
    f: Formula,
    scope: str,
    pred: Optional[Callable[[Formula], bool]] = None,
    *,
    exclude_seq_tails: bool = False,
) -> list[tuple[Path, Formula, bool]]:
    """All matching osubformula occurrences in left-to-right order.

    scope is "surface" (not under anything but parallel connectives),
    "semisurface" (not under choice connectives) or "all".  The returned
    polarity is False only for negated literals.  With exclude_seq_tails,
    occurrences inside the tail of any sequential osubformula are skipped
    (the Claim-4.5 style restriction).
    """
    if scope not in ("surface", "semisurface", "all"):
        raise ValueError(f"bad scope {scope!r}")
    out: list[tuple[Path, Formula, bool]] = []

    def walk(node: Formula, path: Path):
        polarity = not (isinstance(node, Lit) and node.negated)
        if pred is None or pred(node):
            out.append((path, node, polarity))
        if not isinstance(node, Nary):
            return
        family = FAMILY[node.kind]
        if scope == "surface" and family != "par":
            return
        if scope == "semisurface" and family == "cho":
            return
        for i, child in enumerate(node.children, start=1):
            if exclude_seq_tails and family == "seq" and i > 1:
                continue
            walk(child, path + (i,))

    walk(f, ())
    return out


def iter_nodes(f: Formula) -> Iterator[tuple[Path, Formula]]:
    stack = [((), f)]
    while stack:
        path, node = stack.pop()
        yield path, node
        if isinstance(node, Nary):
            for i in range(len(node.children), 0, -1):
                stack.append((path + (i,), node.children[i - 1]))


def atom_names(f: Formula, kind: Optional[str] = None) -> set[str]:
    return {
        node.atom.name
        for _, node in iter_nodes(f)
        if isinstance(node, Lit) and (kind is None or node.atom.kind == kind)
    }


def quasielementarize(f: Formula) -> Formula:
    """|F|: sequential osubformulas become their heads, choice osubformulas
    and general politerals become constants."""
    if isinstance(f, Lit):
        return BOT if f.atom.kind == "general" else f
    if isinstance(f, (Top, Bot)):
        return f
    family = FAMILY[f.kind]
    if family == "seq":
        return quasielementarize(f.children[0])
    if family == "cho":
        return TOP if f.kind == CHO_AND else BOT
    return Nary(f.kind, tuple(quasielementarize(c) for c in f.children))


def elementarize(f: Formula) -> Formula:
    """||F||: toggling osubformulas of a quasielementary formula become constants."""
    if not classify(f).is_quasielementary:
        raise ValueError("elementarize needs a quasielementary formula")
    return _elementarize(f)


def _elementarize(f: Formula) -> Formula:
    if isinstance(f, (Top, Bot, Lit)):
        return f
    if FAMILY[f.kind] == "tog":
        return TOP if f.kind == TOG_AND else BOT
    return Nary(f.kind, tuple(_elementarize(c) for c in f.children))
