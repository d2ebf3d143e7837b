"""Decision procedures for CL13, CL14 and the dual calculus, plus proof objects.

Proof search runs bottom-up over the six rules (five for CL14, five dual
rules for its refutation twin).  Every premise strictly shrinks the pair
(general-atom occurrences, node count), so plain memoization on a canonical
printed form is enough; no cycle detection is needed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from cl13.classical import is_stable
from cl13.formula import (
    CHO_AND,
    CHO_OR,
    FAMILY,
    SEQ_AND,
    SEQ_OR,
    TOG_AND,
    TOG_OR,
    Atom,
    Formula,
    Lit,
    Nary,
    Path,
    classify,
    iter_nodes,
    occurrences,
    parse,
    quasielementarize,
    replace_at,
    subformula_at,
    text,
)

RULES_CL13 = ("TGC", "TGD", "SQC_ADC", "ADD", "SQD", "MATCH")
RULES_DUAL = ("D_TGD", "D_TGC", "D_SQD_ADD", "D_ADC", "D_SQC")

# Per rule: (scope, target kind) of the osubformula it rewrites.  The two
# expansion rules (TGC / D_TGD) and the senior rules take the whole set.
_PICK_TARGET = {
    "TGD": ("surface", TOG_OR),
    "ADD": ("semisurface", CHO_OR),
    "SQD": ("semisurface", SEQ_OR),
    "D_TGC": ("surface", TOG_AND),
    "D_ADC": ("semisurface", CHO_AND),
    "D_SQC": ("semisurface", SEQ_AND),
}


class SearchLimitExceeded(RuntimeError):
    """Raised when the subgoal budget runs out; distinct from Unprovable."""


@dataclass
class ProofNode:
    id: int
    conclusion: Formula
    rule: str
    premises: list["ProofNode"] = field(default_factory=list)
    aux: dict = field(default_factory=dict)
    senior_index: Optional[int] = None  # which premise is the senior one


@dataclass(frozen=True)
class Provable:
    tree: ProofNode


@dataclass(frozen=True)
class Unprovable:
    pass


Verdict = object  # Provable | Unprovable

UNPROVABLE = Unprovable()


# ---------------------------------------------------------------------------
# Premise enumeration

@dataclass(frozen=True)
class Repl:
    """One candidate rewrite: the osubformula at `path` turned into `result`."""

    path: Path
    pick: Optional[int]  # component index, None for sequential head removal
    result: Formula


def _seq_tail(node: Nary) -> Formula:
    if len(node.children) == 2:
        return node.children[1]
    return Nary(node.kind, node.children[1:])


def _targets(f: Formula, scope: str, kind: str, prune: bool) -> list[tuple[Path, Nary]]:
    hits = occurrences(
        f,
        scope,
        lambda n: isinstance(n, Nary) and n.kind == kind,
        exclude_seq_tails=prune,
    )
    return [(path, node) for path, node, _ in hits]


def component_repls(f: Formula, scope: str, kind: str, prune: bool = False) -> list[Repl]:
    out = []
    for path, node in _targets(f, scope, kind, prune):
        for i, child in enumerate(node.children, start=1):
            out.append(Repl(path, i, replace_at(f, path, child)))
    return out


def advance_repls(f: Formula, kind: str, prune: bool = False) -> list[Repl]:
    return [
        Repl(path, None, replace_at(f, path, _seq_tail(node)))
        for path, node in _targets(f, "semisurface", kind, prune)
    ]


@dataclass(frozen=True)
class MatchRepl:
    pos_path: Path
    neg_path: Path
    fresh: Atom
    result: Formula


def match_repls(f: Formula, prune: bool = False) -> list[MatchRepl]:
    """All (positive, negative) semisurface pairings of each general atom."""
    lits = occurrences(
        f,
        "semisurface",
        lambda n: isinstance(n, Lit) and n.atom.kind == "general",
        exclude_seq_tails=prune,
    )
    by_atom: dict[str, tuple[list[Path], list[Path]]] = {}
    for path, node, _ in lits:
        pos, neg = by_atom.setdefault(node.atom.name, ([], []))
        (neg if node.negated else pos).append(path)
    fresh = fresh_pseudo_atom(f)
    out = []
    for name in sorted(by_atom):
        pos_paths, neg_paths = by_atom[name]
        for pos_path, neg_path in itertools.product(pos_paths, neg_paths):
            g = replace_at(f, pos_path, Lit(fresh))
            g = replace_at(g, neg_path, Lit(fresh, negated=True))
            out.append(MatchRepl(pos_path, neg_path, fresh, g))
    return out


def fresh_pseudo_atom(f: Formula) -> Atom:
    used = 0
    for _, node in iter_nodes(f):
        if isinstance(node, Lit) and node.atom.name.startswith("_p"):
            tail = node.atom.name[2:]
            if tail.isdigit():
                used = max(used, int(tail))
    return Atom(f"_p{used + 1}", "elementary", pseudo=True)


@dataclass(frozen=True)
class PremiseSet:
    rule: str
    senior: Optional[Formula]
    items: tuple


def premises(rule: str, f: Formula, *, claim45_pruning: bool = False) -> Optional[PremiseSet]:
    """The rule's required/admissible premises for conclusion f, or None when
    the side condition fails."""
    cls = classify(f)
    prune = claim45_pruning
    if rule == "TGC":
        if not cls.is_quasielementary or not is_stable(f):
            return None
        return PremiseSet(rule, None, tuple(component_repls(f, "surface", TOG_AND)))
    if rule == "D_TGD":
        if not cls.is_quasielementary or is_stable(f):
            return None
        return PremiseSet(rule, None, tuple(component_repls(f, "surface", TOG_OR)))
    if rule in _PICK_TARGET:
        scope, kind = _PICK_TARGET[rule]
        if rule in ("TGD", "D_TGC") and not cls.is_quasielementary:
            return None
        if kind in (SEQ_OR, SEQ_AND):
            items = advance_repls(f, kind, prune)
        else:
            items = component_repls(f, scope, kind, prune)
        return PremiseSet(rule, None, tuple(items)) if items else None
    if rule in ("SQC_ADC", "D_SQD_ADD"):
        if cls.is_quasielementary:
            return None
        cho = CHO_AND if rule == "SQC_ADC" else CHO_OR
        seq = SEQ_AND if rule == "SQC_ADC" else SEQ_OR
        juniors = tuple(
            component_repls(f, "semisurface", cho, prune) + advance_repls(f, seq, prune)
        )
        return PremiseSet(rule, quasielementarize(f), juniors)
    if rule == "MATCH":
        items = tuple(match_repls(f, prune))
        return PremiseSet(rule, None, items) if items else None
    raise ValueError(f"unknown rule {rule!r}")


# ---------------------------------------------------------------------------
# Canonical form for memoization

def canonical_key(f: Formula) -> str:
    """Printed form with pseudo atoms renamed in order of first occurrence."""
    rename: dict[str, str] = {}
    odd_kinds: list[str] = []

    def walk(node: Formula) -> Formula:
        if isinstance(node, Lit):
            atom = node.atom
            name = atom.name
            if atom.pseudo:
                if name not in rename:
                    rename[name] = f"_c{len(rename) + 1}"
                name = rename[name]
            elif (atom.kind == "general") != name[0].isupper():
                odd_kinds.append(f"{name}:{atom.kind}")
            if name != atom.name:
                return Lit(Atom(name, atom.kind, atom.pseudo), node.negated)
            return node
        if isinstance(node, Nary):
            return Nary(node.kind, tuple(walk(c) for c in node.children))
        return node

    key = text(walk(f))
    if odd_kinds:
        key += " ;; " + ",".join(sorted(set(odd_kinds)))
    return key


# ---------------------------------------------------------------------------
# Search

class _Search:
    """Bottom-up provability search with memoized verdicts and rule witnesses."""

    def __init__(self, system: str, claim45_pruning: bool, budget: int):
        self.system = system  # "cl13" | "cl14" | "cl14bar"
        self.prune = claim45_pruning
        self.budget = budget
        self.memo: dict[str, tuple[bool, Optional[tuple]]] = {}
        self.subgoals = 0

    def provable(self, f: Formula) -> bool:
        key = canonical_key(f)
        cached = self.memo.get(key)
        if cached is not None:
            return cached[0]
        self.subgoals += 1
        if self.subgoals > self.budget:
            raise SearchLimitExceeded(f"more than {self.budget} distinct subgoals")
        verdict = self._decide(f)
        self.memo[key] = verdict
        return verdict[0]

    def _decide(self, f: Formula) -> tuple[bool, Optional[tuple]]:
        if self.system == "cl14bar":
            return self._decide_dual(f)
        if classify(f).is_quasielementary:
            # cheap single-premise picks first, then the full expansion
            for repl in component_repls(f, "surface", TOG_OR):
                if self.provable(repl.result):
                    return True, ("TGD", repl.path, repl.pick)
            if is_stable(f) and all(
                self.provable(r.result)
                for r in component_repls(f, "surface", TOG_AND)
            ):
                return True, ("TGC",)
            return False, None
        for repl in component_repls(f, "semisurface", CHO_OR, self.prune):
            if self.provable(repl.result):
                return True, ("ADD", repl.path, repl.pick)
        for repl in advance_repls(f, SEQ_OR, self.prune):
            if self.provable(repl.result):
                return True, ("SQD", repl.path)
        if self.system == "cl13":
            for m in match_repls(f, self.prune):
                if self.provable(m.result):
                    return True, ("MATCH", m.pos_path, m.neg_path)
        if self.provable(quasielementarize(f)) and all(
            self.provable(r.result)
            for r in component_repls(f, "semisurface", CHO_AND, self.prune)
            + advance_repls(f, SEQ_AND, self.prune)
        ):
            return True, ("SQC_ADC",)
        return False, None

    def _decide_dual(self, f: Formula) -> tuple[bool, Optional[tuple]]:
        if classify(f).is_quasielementary:
            for repl in component_repls(f, "surface", TOG_AND):
                if self.provable(repl.result):
                    return True, ("D_TGC", repl.path, repl.pick)
            if not is_stable(f) and all(
                self.provable(r.result)
                for r in component_repls(f, "surface", TOG_OR)
            ):
                return True, ("D_TGD",)
            return False, None
        for repl in component_repls(f, "semisurface", CHO_AND):
            if self.provable(repl.result):
                return True, ("D_ADC", repl.path, repl.pick)
        for repl in advance_repls(f, SEQ_AND):
            if self.provable(repl.result):
                return True, ("D_SQC", repl.path)
        if self.provable(quasielementarize(f)) and all(
            self.provable(r.result)
            for r in component_repls(f, "semisurface", CHO_OR)
            + advance_repls(f, SEQ_OR)
        ):
            return True, ("D_SQD_ADD",)
        return False, None

    # -- proof reconstruction ------------------------------------------------

    def build_tree(self, f: Formula) -> ProofNode:
        self._next_id = itertools.count(1)
        self._fresh = itertools.count(self._pseudo_floor(f) + 1)
        return self._build(f)

    def _pseudo_floor(self, f: Formula) -> int:
        floor = 0
        for _, node in iter_nodes(f):
            if isinstance(node, Lit) and node.atom.name.startswith("_p"):
                tail = node.atom.name[2:]
                if tail.isdigit():
                    floor = max(floor, int(tail))
        return floor

    def _node(self, f: Formula, rule: str, kids: list[ProofNode], aux: dict,
              senior: Optional[int] = None) -> ProofNode:
        return ProofNode(next(self._next_id), f, rule, kids, aux, senior)

    def _build(self, f: Formula) -> ProofNode:
        witness = self.memo[canonical_key(f)][1]
        assert witness is not None, "build_tree on an unprovable formula"
        rule = witness[0]
        if rule in ("TGC", "D_TGD"):
            kind = TOG_AND if rule == "TGC" else TOG_OR
            kids = [self._build(r.result) for r in component_repls(f, "surface", kind)]
            return self._node(f, rule, kids, {})
        if rule in ("SQC_ADC", "D_SQD_ADD"):
            cho = CHO_AND if rule == "SQC_ADC" else CHO_OR
            seq = SEQ_AND if rule == "SQC_ADC" else SEQ_OR
            prune = self.prune if rule == "SQC_ADC" else False
            senior = self._build(quasielementarize(f))
            juniors = [
                self._build(r.result)
                for r in component_repls(f, "semisurface", cho, prune)
                + advance_repls(f, seq, prune)
            ]
            return self._node(f, rule, [senior] + juniors, {}, senior=0)
        if rule == "MATCH":
            _, pos_path, neg_path = witness
            fresh = Atom(f"_p{next(self._fresh)}", "elementary", pseudo=True)
            g = replace_at(f, pos_path, Lit(fresh))
            g = replace_at(g, neg_path, Lit(fresh, negated=True))
            kid = self._build(g)
            aux = {"pos_path": pos_path, "neg_path": neg_path, "fresh": fresh.name}
            return self._node(f, rule, [kid], aux)
        if rule in ("SQD", "D_SQC"):
            _, path = witness
            node = subformula_at(f, path)
            kid = self._build(replace_at(f, path, _seq_tail(node)))
            return self._node(f, rule, [kid], {"path": path})
        # component picks: TGD / ADD / D_TGC / D_ADC
        _, path, pick = witness
        node = subformula_at(f, path)
        kid = self._build(replace_at(f, path, node.children[pick - 1]))
        return self._node(f, rule, [kid], {"path": path, "pick": pick})


def _decide(f: Formula, system: str, claim45_pruning: bool, budget: int) -> Verdict:
    search = _Search(system, claim45_pruning, budget)
    if not search.provable(f):
        return UNPROVABLE
    if claim45_pruning:
        # trees always carry full premise sets; rerun without the shortcut
        search = _Search(system, False, budget)
        assert search.provable(f)
    return Provable(search.build_tree(f))


def decide_cl13(f: Formula, *, claim45_pruning: bool = False,
                budget: int = 10 ** 6) -> Verdict:
    """CL13 provability with a proof tree on success."""
    return _decide(f, "cl13", claim45_pruning, budget)


def decide_cl14(f: Formula, *, budget: int = 10 ** 6) -> Verdict:
    """The elementary-base fragment: same rules, no MATCH."""
    if not classify(f).is_elementary_base:
        raise ValueError("CL14 needs an elementary-base formula")
    return _decide(f, "cl14", False, budget)


def decide_cl14bar(f: Formula, *, budget: int = 10 ** 6) -> Verdict:
    """Provability in the dual refutation calculus."""
    if not classify(f).is_elementary_base:
        raise ValueError("the dual calculus needs an elementary-base formula")
    return _decide(f, "cl14bar", False, budget)


# ---------------------------------------------------------------------------
# Proof checking

@dataclass(frozen=True)
class CheckError:
    node_id: int
    reason: str


def _all_nodes(root: ProofNode) -> list[ProofNode]:
    seen: dict[int, ProofNode] = {}
    stack = [root]
    while stack:
        node = stack.pop()
        if node.id in seen:
            continue
        seen[node.id] = node
        stack.extend(node.premises)
    return list(seen.values())


def _descendant_ids(node: ProofNode) -> set[int]:
    return {n.id for n in _all_nodes(node)}


def check_proof(root: ProofNode, *, dual: Optional[bool] = None) -> list[CheckError]:
    """Verify every node against its rule; empty list means the proof is good.

    Accepts shared premises (several parents referencing one node).  The
    MATCH freshness condition is global: each fresh atom is introduced once,
    occurs nowhere outside the introducing subtree, and not in the root.
    """
    errors: list[CheckError] = []
    nodes = _all_nodes(root)
    if dual is None:
        dual = any(n.rule in RULES_DUAL for n in nodes)
    expected_rules = RULES_DUAL if dual else RULES_CL13

    for node in nodes:
        if node.rule not in expected_rules:
            errors.append(CheckError(node.id, f"rule {node.rule} not in this calculus"))
            continue
        errors.extend(_check_node(node))

    errors.extend(_check_match_freshness(root, nodes))
    return errors


def _check_node(node: ProofNode) -> list[CheckError]:
    f = node.conclusion
    rule = node.rule
    err = lambda reason: [CheckError(node.id, reason)]

    if rule in ("TGC", "D_TGD"):
        pset = premises(rule, f)
        if pset is None:
            side = "stable" if rule == "TGC" else "instable"
            return err(f"conclusion is not a {side} quasielementary formula")
        want = sorted(canonical_key(r.result) for r in pset.items)
        got = sorted(canonical_key(p.conclusion) for p in node.premises)
        if want != got:
            return err("premise multiset does not match the required expansion")
        return []

    if rule in ("SQC_ADC", "D_SQD_ADD"):
        pset = premises(rule, f)
        if pset is None:
            return err("conclusion is quasielementary")
        if node.senior_index is None or not 0 <= node.senior_index < len(node.premises):
            return err("missing senior premise index")
        senior = node.premises[node.senior_index]
        if canonical_key(senior.conclusion) != canonical_key(pset.senior):
            return err("senior premise is not the quasielementarization")
        juniors = [p for i, p in enumerate(node.premises) if i != node.senior_index]
        want = sorted(canonical_key(r.result) for r in pset.items)
        got = sorted(canonical_key(p.conclusion) for p in juniors)
        if want != got:
            return err("junior premises do not match the required set")
        return []

    if rule == "MATCH":
        if len(node.premises) != 1:
            return err("MATCH takes exactly one premise")
        aux = node.aux
        if not {"pos_path", "neg_path", "fresh"} <= aux.keys():
            return err("MATCH needs pos_path, neg_path and fresh")
        try:
            pos = subformula_at(f, aux["pos_path"])
            neg = subformula_at(f, aux["neg_path"])
        except ValueError:
            return err("invalid path")
        if not (isinstance(pos, Lit) and isinstance(neg, Lit)):
            return err("MATCH paths must point at literals")
        if pos.atom.kind != "general" or neg.atom.kind != "general":
            return err("MATCH replaces general atoms")
        if pos.atom.name != neg.atom.name or pos.negated or not neg.negated:
            return err("MATCH needs one positive and one negative occurrence of one atom")
        semi = {p for p, _, _ in occurrences(f, "semisurface")}
        if aux["pos_path"] not in semi or aux["neg_path"] not in semi:
            return err("MATCH occurrences must be semisurface")
        try:
            fresh = Atom(aux["fresh"], "elementary", pseudo=aux["fresh"].startswith("_"))
        except ValueError:
            return err("fresh atom must be elementary")
        if fresh.name[0].isupper():
            return err("fresh atom must be elementary")
        if fresh.name in {a for a in _atom_names_of(f)}:
            return err("fresh atom already occurs in the conclusion")
        g = replace_at(f, aux["pos_path"], Lit(fresh))
        g = replace_at(g, aux["neg_path"], Lit(fresh, negated=True))
        if g != node.premises[0].conclusion:
            return err("premise does not match the MATCH rewrite")
        return []

    # single-premise pick/advance rules
    scope, kind = _PICK_TARGET[rule]
    if rule in ("TGD", "D_TGC") and not classify(f).is_quasielementary:
        return err("conclusion must be quasielementary")
    if len(node.premises) != 1:
        return err(f"{rule} takes exactly one premise")
    if "path" not in node.aux:
        return err(f"{rule} needs a path")
    path = node.aux["path"]
    try:
        target = subformula_at(f, path)
    except ValueError:
        return err("invalid path")
    if not (isinstance(target, Nary) and target.kind == kind):
        return err(f"target at path is not a {kind} osubformula")
    in_scope = {p for p, _, _ in occurrences(f, scope)}
    if path not in in_scope:
        return err(f"target occurrence is not {scope}")
    if rule in ("SQD", "D_SQC"):
        want = replace_at(f, path, _seq_tail(target))
    else:
        pick = node.aux.get("pick")
        if not (isinstance(pick, int) and 1 <= pick <= len(target.children)):
            return err("pick out of range")
        want = replace_at(f, path, target.children[pick - 1])
    if want != node.premises[0].conclusion:
        return err("premise does not match the rewrite")
    return []


def _atom_names_of(f: Formula) -> set[str]:
    return {
        node.atom.name for _, node in iter_nodes(f) if isinstance(node, Lit)
    }


def _check_match_freshness(root: ProofNode, nodes: list[ProofNode]) -> list[CheckError]:
    errors = []
    introduced: dict[str, ProofNode] = {}
    for node in nodes:
        if node.rule != "MATCH":
            continue
        name = node.aux.get("fresh")
        if not isinstance(name, str):
            continue  # structural error already reported
        if name in introduced:
            errors.append(CheckError(node.id, f"fresh atom {name} introduced twice"))
            continue
        introduced[name] = node
    root_atoms = _atom_names_of(root.conclusion)
    for name, node in introduced.items():
        if name in root_atoms:
            errors.append(CheckError(node.id, f"fresh atom {name} occurs in the root"))
            continue
        inside = _descendant_ids(node)
        for other in nodes:
            if other.id not in inside and name in _atom_names_of(other.conclusion):
                errors.append(CheckError(
                    node.id, f"fresh atom {name} leaks outside its subtree"))
                break
    return errors


# ---------------------------------------------------------------------------
# Proof files

PROOF_HEADER = "cl13-proof v1"


def _path_str(path: Path) -> str:
    return ".".join(str(s) for s in path)


def _parse_path(value: str) -> Path:
    if value == "":
        return ()
    return tuple(int(s) for s in value.split("."))


def write_proof(root: ProofNode) -> str:
    """Line-based proof text: children before parents, `qed <root id>` last."""
    lines = [PROOF_HEADER]
    emitted: set[int] = set()

    def emit(node: ProofNode):
        if node.id in emitted:
            return
        for child in node.premises:
            emit(child)
        emitted.add(node.id)
        aux_parts = []
        for key in ("path", "pos_path", "neg_path"):
            if key in node.aux:
                aux_parts.append(f"{key}={_path_str(node.aux[key])}")
        if "pick" in node.aux:
            aux_parts.append(f"pick={node.aux['pick']}")
        if "fresh" in node.aux:
            aux_parts.append(f"fresh={node.aux['fresh']}")
        if node.senior_index is not None:
            aux_parts.append(f"senior={node.premises[node.senior_index].id}")
        ids = ",".join(str(p.id) for p in node.premises)
        lines.append(
            f"{node.id} | {text(node.conclusion)} | {node.rule} | {ids} | "
            + " ".join(aux_parts)
        )

    emit(root)
    lines.append(f"qed {root.id}")
    return "\n".join(lines) + "\n"


class ProofFormatError(ValueError):
    pass


def read_proof(source: str) -> ProofNode:
    """Parse the proof file format back into a (possibly DAG-shaped) ProofNode."""
    lines = [ln.strip() for ln in source.splitlines() if ln.strip()]
    if not lines or lines[0] != PROOF_HEADER:
        raise ProofFormatError(f"missing {PROOF_HEADER!r} header")
    if not lines[-1].startswith("qed "):
        raise ProofFormatError("missing qed line")
    try:
        root_id = int(lines[-1][4:])
    except ValueError:
        raise ProofFormatError("bad qed line")
    nodes: dict[int, ProofNode] = {}
    for line in lines[1:-1]:
        fields = line.split("|")
        if len(fields) < 5:
            raise ProofFormatError(f"too few fields: {line!r}")
        node_id = int(fields[0].strip())
        rule = fields[-3].strip()
        ids_field = fields[-2].strip()
        aux_field = fields[-1].strip()
        formula_text = "|".join(fields[1:-3]).strip()
        conclusion = parse(formula_text)
        premise_ids = [int(s) for s in ids_field.split(",") if s.strip()]
        try:
            kids = [nodes[i] for i in premise_ids]
        except KeyError as e:
            raise ProofFormatError(f"node {node_id} references unknown premise {e}")
        aux: dict = {}
        senior_index = None
        for part in aux_field.split():
            key, _, value = part.partition("=")
            if key in ("path", "pos_path", "neg_path"):
                aux[key] = _parse_path(value)
            elif key == "pick":
                aux[key] = int(value)
            elif key == "fresh":
                aux[key] = value
            elif key == "senior":
                senior_index = premise_ids.index(int(value))
            else:
                raise ProofFormatError(f"unknown aux key {key!r}")
        if node_id in nodes:
            raise ProofFormatError(f"duplicate node id {node_id}")
        nodes[node_id] = ProofNode(node_id, conclusion, rule, kids, aux, senior_index)
    if root_id not in nodes:
        raise ProofFormatError(f"qed references unknown node {root_id}")
    return nodes[root_id]


def expand_to_tree(root: ProofNode) -> ProofNode:
    """Clone a proof DAG into a genuine tree with unique node ids."""
    counter = itertools.count(1)

    def clone(node: ProofNode) -> ProofNode:
        kids = [clone(p) for p in node.premises]
        return ProofNode(next(counter), node.conclusion, node.rule, kids,
                         dict(node.aux), node.senior_index)

    return clone(root)
