"""Strategy extraction: hyperformulas, proof-tree annotation, play agents.

A proof of F compiles into an interpretation-blind machine agent; a dual
proof compiles into an environment counteragent.  Both walk the annotated
proof tree: descending emits the choice/switch moves the visited rules
stand for, and the adversary's choice/switch moves trigger backtracking
jumps.  Hyperformulas record, per tree node, which components are
underlined (chosen/active) and which literal pairs were matched.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field, replace as dc_replace
from typing import Callable, Optional

from cl13.formula import (
    FAMILY,
    Atom,
    Bot,
    Formula,
    Lit,
    Nary,
    Path,
    Top,
    iter_nodes,
    occurrences,
    subformula_at,
)
from cl13.prover import (
    ProofNode,
    advance_repls,
    check_proof,
    component_repls,
    canonical_key,
)
from cl13.semantics import (
    GameSpec,
    LabMove,
    Move,
    Player,
    Run,
    _State,
    is_delay,
    legal,
    legal_moves,
    owner,
    solve_bounded,
    winner,
)

TOG_KINDS = {"%&", "%|"}
SEQ_KINDS = {"$&", "$|"}
CHO_KINDS = {"!&", "!|"}


# ---------------------------------------------------------------------------
# Hyperformulas

@dataclass(frozen=True)
class Hyper:
    """The root formula with underlined components and matched literal pairs."""

    base: Formula
    underlines: frozenset[Path]
    pseudo: tuple[tuple[Path, tuple[str, str]], ...]  # path -> (origin, pseudo name)

    def pseudo_map(self) -> dict[Path, tuple[str, str]]:
        return dict(self.pseudo)

    def underlined_at(self, node_path: Path) -> Optional[int]:
        """The underlined component index of the node at node_path, if any."""
        for u in self.underlines:
            if len(u) == len(node_path) + 1 and u[:-1] == node_path:
                return u[-1]
        return None

    def with_underline(self, node_path: Path, i: int) -> "Hyper":
        return dc_replace(self, underlines=self.underlines | {node_path + (i,)})

    def with_advanced_underline(self, node_path: Path, from_i: int) -> "Hyper":
        lines = set(self.underlines)
        lines.discard(node_path + (from_i,))
        lines.add(node_path + (from_i + 1,))
        return dc_replace(self, underlines=frozenset(lines))

    def with_match(self, pos: Path, neg: Path, origin: str, pseudo: str) -> "Hyper":
        extra = ((pos, (origin, pseudo)), (neg, (origin, pseudo)))
        return dc_replace(self, pseudo=self.pseudo + extra)

    def effective(self) -> Formula:
        """Base formula with the matched literals renamed to pseudo atoms."""
        table = self.pseudo_map()

        def walk(node: Formula, path: Path) -> Formula:
            if path in table and isinstance(node, Lit):
                _, name = table[path]
                return Lit(Atom(name, "elementary", pseudo=True), node.negated)
            if isinstance(node, Nary):
                return Nary(node.kind, tuple(
                    walk(c, path + (i,)) for i, c in enumerate(node.children, 1)))
            return node

        return walk(self.base, ())

    def is_abandoned(self, path: Path) -> bool:
        """True when path sits right of nothing: inside an unchosen choice
        sibling or left of a sequential underline."""
        node = self.base
        for depth, step in enumerate(path):
            prefix = path[:depth]
            if isinstance(node, Nary):
                u = self.underlined_at(prefix)
                family = FAMILY[node.kind]
                if family == "cho" and u is not None and step != u:
                    return True
                if family == "seq" and u is not None and step < u:
                    return True
                node = node.children[step - 1]
        return False

    def is_virgin(self, node_path: Path) -> bool:
        return self.underlined_at(node_path) is None

    def partner(self, lit_path: Path) -> Optional[Path]:
        table = self.pseudo_map()
        if lit_path not in table:
            return None
        _, name = table[lit_path]
        for other, (_, other_name) in table.items():
            if other != lit_path and other_name == name:
                return other
        return None


def root_hyper(f: Formula) -> Hyper:
    """Underline the leftmost component of every sequential osubformula."""
    lines = {
        path + (1,)
        for path, node in iter_nodes(f)
        if isinstance(node, Nary) and FAMILY[node.kind] == "seq"
    }
    return Hyper(f, frozenset(lines), ())


def project_hyper(h: Hyper, mode: int) -> tuple[Formula, dict[Path, Path]]:
    """Recover the plain formula a hyperformula abbreviates.

    Mode 1 collapses settled choices and drops abandoned sequential heads;
    mode 2 additionally erases general politerals, abbreviates virgin choice
    osubformulas as constants and collapses settled sequential/toggling
    osubformulas entirely.  Returns the formula plus a map from its paths
    back to hyperformula paths.
    """
    assert mode in (1, 2)
    corr: dict[Path, Path] = {}
    effective = h.effective()

    def go(node: Formula, hpath: Path, rpath: Path) -> Formula:
        corr[rpath] = hpath
        if isinstance(node, Lit):
            if mode == 2 and node.atom.kind == "general":
                return Bot()
            return node
        if not isinstance(node, Nary):
            return node
        family = FAMILY[node.kind]
        u = h.underlined_at(hpath)
        if family == "cho":
            if u is not None:
                return go(node.children[u - 1], hpath + (u,), rpath)
            if mode == 2:
                return Top() if node.kind == "!&" else Bot()
        elif family == "seq":
            assert u is not None, "sequential osubformulas always carry an underline"
            if mode == 2 or u == len(node.children):
                return go(node.children[u - 1], hpath + (u,), rpath)
            kids = tuple(
                go(node.children[j - 1], hpath + (j,), rpath + (idx,))
                for idx, j in enumerate(range(u, len(node.children) + 1), 1)
            )
            return Nary(node.kind, kids)
        elif family == "tog":
            if mode == 2 and u is not None:
                return go(node.children[u - 1], hpath + (u,), rpath)
        kids = tuple(
            go(c, hpath + (i,), rpath + (i,))
            for i, c in enumerate(node.children, 1)
        )
        return Nary(node.kind, kids)

    return go(effective, (), ()), corr


# ---------------------------------------------------------------------------
# Annotated proof trees

# Rule vocabulary per role: the machine plays CL13/CL14 proofs, the
# environment plays dual proofs.
@dataclass(frozen=True)
class RoleRules:
    player: Player
    expansion: str       # set-premise rule over togglings; leaves carry it
    senior: str          # the senior/junior rule
    tog_pick: str
    cho_pick: str
    seq_pick: str
    match: Optional[str]
    exp_kind: str        # toggling kind expanded by `expansion`
    pick_tog_kind: str
    junior_cho_kind: str
    junior_seq_kind: str


MACHINE_RULES = RoleRules(
    Player.MACHINE, "TGC", "SQC_ADC", "TGD", "ADD", "SQD", "MATCH",
    exp_kind="%&", pick_tog_kind="%|", junior_cho_kind="!&", junior_seq_kind="$&",
)
ENVIRONMENT_RULES = RoleRules(
    Player.ENVIRONMENT, "D_TGD", "D_SQD_ADD", "D_TGC", "D_ADC", "D_SQC", None,
    exp_kind="%|", pick_tog_kind="%&", junior_cho_kind="!|", junior_seq_kind="$|",
)


@dataclass
class ANode:
    proof: ProofNode
    hyper: Hyper
    action: tuple  # how this node's hyper refines the parent's
    parent: Optional["ANode"] = None
    children: list["ANode"] = field(default_factory=list)
    corr: dict[Path, Path] = field(default_factory=dict)
    surface_groups: list[tuple[Path, Path]] = field(default_factory=list)

    @property
    def id(self) -> int:
        return self.proof.id

    @property
    def rule(self) -> str:
        return self.proof.rule

    def child_by_action(self, action: tuple) -> "ANode":
        for child in self.children:
            if child.action == action:
                return child
        raise KeyError(f"node {self.id} has no child for {action}")


@dataclass
class AnnotatedTree:
    root: ANode
    rules: RoleRules
    by_id: dict[int, ANode]

    @property
    def base(self) -> Formula:
        return self.root.hyper.base


class AnnotationError(ValueError):
    pass


def annotate(proof: ProofNode, *, role: str = "machine") -> AnnotatedTree:
    """Attach hyperformulas and correspondence maps to a checked proof tree."""
    rules = MACHINE_RULES if role == "machine" else ENVIRONMENT_RULES
    errors = check_proof(proof, dual=role == "environment")
    if errors:
        raise AnnotationError(f"proof does not check: {errors[:3]}")
    by_id: dict[int, ANode] = {}

    def build(node: ProofNode, hyper: Hyper, action: tuple, parent) -> ANode:
        if node.id in by_id:
            raise AnnotationError(
                f"node {node.id} is shared between branches; expand the DAG first")
        mode = 2 if node.rule in (rules.expansion, rules.tog_pick) else 1
        derived, corr = project_hyper(hyper, mode)
        if canonical_key(derived) != canonical_key(node.conclusion):
            raise AnnotationError(
                f"node {node.id}: hyperformula does not project onto the conclusion")
        anode = ANode(node, hyper, action, parent, corr=corr)
        by_id[node.id] = anode
        if node.rule == rules.expansion:
            fpaths = [
                p for p, _, _ in occurrences(
                    node.conclusion, "surface",
                    lambda n: isinstance(n, Nary) and n.kind == rules.exp_kind)
            ]
            anode.surface_groups = [(fp, corr[fp]) for fp in fpaths]
        anode.children = _annotate_children(node, anode, rules)
        return anode

    def _annotate_children(node: ProofNode, anode: ANode, rules: RoleRules):
        h, corr = anode.hyper, anode.corr
        out = []
        rule = node.rule
        if rule == rules.expansion:
            repls = component_repls(node.conclusion, "surface", rules.exp_kind)
            for child, repl in _pair_children(node.premises, repls):
                hpath = corr[repl.path]
                out.append(build(child, h.with_underline(hpath, repl.pick),
                                 ("tog", hpath, repl.pick), anode))
            return out
        if rule == rules.senior:
            senior = node.premises[node.senior_index]
            out.append(build(senior, h, ("senior",), anode))
            juniors = [p for i, p in enumerate(node.premises)
                       if i != node.senior_index]
            repls = component_repls(node.conclusion, "semisurface", rules.junior_cho_kind) \
                + advance_repls(node.conclusion, rules.junior_seq_kind)
            for child, repl in _pair_children(juniors, repls):
                hpath = corr[repl.path]
                if repl.pick is None:
                    from_i = h.underlined_at(hpath)
                    out.append(build(child, h.with_advanced_underline(hpath, from_i),
                                     ("seq", hpath, from_i), anode))
                else:
                    out.append(build(child, h.with_underline(hpath, repl.pick),
                                     ("cho", hpath, repl.pick), anode))
            return out
        if rule in (rules.tog_pick, rules.cho_pick):
            hpath = corr[node.aux["path"]]
            pick = node.aux["pick"]
            tag = "tog" if rule == rules.tog_pick else "cho"
            out.append(build(node.premises[0], h.with_underline(hpath, pick),
                             (tag, hpath, pick), anode))
            return out
        if rule == rules.seq_pick:
            hpath = corr[node.aux["path"]]
            from_i = h.underlined_at(hpath)
            out.append(build(node.premises[0], h.with_advanced_underline(hpath, from_i),
                             ("seq", hpath, from_i), anode))
            return out
        if rule == rules.match:
            pos = corr[node.aux["pos_path"]]
            neg = corr[node.aux["neg_path"]]
            origin = subformula_at(h.effective(), pos).atom.name
            fresh = node.aux["fresh"]
            out.append(build(node.premises[0], h.with_match(pos, neg, origin, fresh),
                             ("match", pos, neg, fresh), anode))
            return out
        raise AnnotationError(f"rule {rule} does not belong to this role")

    root = build(proof, root_hyper(proof.conclusion), ("root",), None)
    return AnnotatedTree(root, rules, by_id)


def _pair_children(children, repls):
    """Match premise nodes to replacement descriptors by formula identity."""
    remaining = list(children)
    pairs = []
    for repl in repls:
        key = canonical_key(repl.result)
        for idx, child in enumerate(remaining):
            if canonical_key(child.conclusion) == key:
                pairs.append((remaining.pop(idx), repl))
                break
        else:
            raise AnnotationError(f"no premise found for descriptor {repl}")
    if remaining:
        raise AnnotationError("premises left over after matching descriptors")
    return pairs


# ---------------------------------------------------------------------------
# Formula-shape position tracking

class CleanEnvironmentViolation(Exception):
    """The adversary made a move the game rules forbid."""


@dataclass(frozen=True)
class Resolution:
    kind: str            # "switch" | "choice" | "inlit"
    path: Path           # static path of the resolving node
    index: Optional[int] = None
    residual: tuple[int, ...] = ()


class ShapeTracker:
    """Replays moves against the formula tree, treating literal leaves as
    opaque subgames.  Mirrors the runtime's legality rules at formula level."""

    def __init__(self, f: Formula):
        self.formula = f
        self.chosen: dict[Path, int] = {}
        self.switches: dict[Path, list[int]] = {}

    def active(self, node_path: Path) -> int:
        sw = self.switches.get(node_path)
        return sw[-1] if sw else 1

    def feed(self, player: Player, steps: tuple[int, ...]) -> Resolution:
        node = self.formula
        path: Path = ()
        s = steps
        while True:
            if isinstance(node, Lit):
                return Resolution("inlit", path, residual=s)
            if isinstance(node, (Top, Bot)):
                raise CleanEnvironmentViolation(f"move inside a constant at {path}")
            family = FAMILY[node.kind]
            n = len(node.children)
            if family == "cho":
                ch = self.chosen.get(path)
                if ch is None:
                    if len(s) == 1 and player is owner(node.kind) and 1 <= s[0] <= n:
                        self.chosen[path] = s[0]
                        return Resolution("choice", path, s[0])
                    raise CleanEnvironmentViolation(f"bad choice move at {path}")
                node = node.children[ch - 1]
                path = path + (ch,)
                continue
            if len(s) == 1:
                i = s[0]
                if family == "par" or player is not owner(node.kind) or not 1 <= i <= n:
                    raise CleanEnvironmentViolation(f"bad switch at {path}")
                sw = self.switches.setdefault(path, [])
                if family == "seq" and i != len(sw) + 2:
                    raise CleanEnvironmentViolation(f"non-consecutive switch at {path}")
                sw.append(i)
                return Resolution("switch", path, i)
            i = s[0]
            if not 1 <= i <= n:
                raise CleanEnvironmentViolation(f"index {i} out of range at {path}")
            node = node.children[i - 1]
            path = path + (i,)
            s = s[1:]

    def dynamic_prefix(self, node_path: Path) -> tuple[int, ...]:
        """Move-path prefix addressing the node: settled choice nodes
        contribute no step."""
        node = self.formula
        prefix: list[int] = []
        for depth, step in enumerate(node_path):
            at = node_path[:depth]
            if isinstance(node, Nary) and FAMILY[node.kind] == "cho":
                ch = self.chosen.get(at)
                if ch != step:
                    raise ValueError(f"descending into unchosen component at {at}")
            else:
                prefix.append(step)
            node = node.children[step - 1]
        return tuple(prefix)


# ---------------------------------------------------------------------------
# The WORK / COUNTERWORK agent

class StrategyAgent:
    """Plays a game by walking an annotated proof tree.

    The agent never sees the interpretation: it tracks the position on the
    formula shape and treats atom subgames as opaque move streams, mirroring
    them between matched politeral pairs.
    """

    def __init__(self, tree: AnnotatedTree,
                 on_jump: Optional[Callable[[ANode, Run], None]] = None):
        self.tree = tree
        self.player = tree.rules.player
        self.tracker = ShapeTracker(tree.base)
        self.node: Optional[ANode] = None
        self.seen = 0
        self.pending: deque[Move] = deque()
        self.chronology: list[tuple[Player, Move, Resolution]] = []
        self.jumps: list[tuple[int, int]] = []  # (node id, chronology length)
        self.flag: Optional[str] = None
        self.on_jump = on_jump

    @property
    def visited(self) -> list[int]:
        return [nid for nid, _ in self.jumps]

    def observed_run(self) -> Run:
        return tuple((p, m) for p, m, _ in self.chronology)

    # -- scheduling ----------------------------------------------------------

    def on_turn(self, position: Run) -> list[Move]:
        if self.flag:
            return []
        out: list[Move] = []
        try:
            if self.node is None:
                self._enter(self.tree.root, out)
            for player, mv in position[self.seen:]:
                self.seen += 1
                if player is self.player:
                    expected = self.pending.popleft()
                    assert mv == expected, "scheduler reordered our moves"
                    continue
                res = self._feed(player, mv)
                self._handle_adversary(res, out)
        except CleanEnvironmentViolation as exc:
            self.flag = str(exc) or "adversary broke the game rules"
            return []
        return out

    def _feed(self, player: Player, mv: Move) -> Resolution:
        res = self.tracker.feed(player, mv.steps)
        self.chronology.append((player, mv, res))
        return res

    def _emit(self, mv: Move, out: list[Move]):
        self._feed(self.player, mv)
        self.pending.append(mv)
        out.append(mv)

    # -- descending ----------------------------------------------------------

    def _enter(self, node: ANode, out: list[Move]):
        while True:
            self.node = node
            self.jumps.append((node.id, len(self.chronology)))
            if self.on_jump:
                self.on_jump(node, self.observed_run())
            rules = self.tree.rules
            rule = node.rule
            if rule == rules.expansion:
                if not node.children:
                    return  # idle at the leaf until something happens
                fpath, hpath = node.surface_groups[0]
                active = self.tracker.active(hpath)
                node = node.child_by_action(("tog", hpath, active))
                continue
            if rule == rules.senior:
                node = node.child_by_action(("senior",))
                continue
            child = node.children[0]
            action = child.action
            if action[0] in ("tog", "cho"):
                _, hpath, i = action
                self._emit(Move(self.tracker.dynamic_prefix(hpath) + (i,)), out)
            elif action[0] == "seq":
                _, hpath, from_i = action
                self._emit(Move(self.tracker.dynamic_prefix(hpath) + (from_i + 1,)), out)
            elif action[0] == "match":
                self._catch_up(action, out)
            node = child

    def _catch_up(self, action: tuple, out: list[Move]):
        """Copy every adversary move made so far in either matched politeral
        into the twin, in their original order."""
        _, pos, neg, _ = action
        for player, _, res in list(self.chronology):
            if player is self.player or res.kind != "inlit":
                continue
            if res.path == pos:
                target = neg
            elif res.path == neg:
                target = pos
            else:
                continue
            self._emit(Move(self.tracker.dynamic_prefix(target) + res.residual), out)

    # -- reacting ------------------------------------------------------------

    def _handle_adversary(self, res: Resolution, out: list[Move]):
        node = self.node
        rules = self.tree.rules
        hyper = node.hyper
        if res.kind == "inlit":
            if hyper.is_abandoned(res.path):
                return
            partner = hyper.partner(res.path)
            if partner is None:
                return  # move inside a still-general oliteral
            if hyper.is_abandoned(partner):
                return  # widowed politeral
            self._emit(Move(self.tracker.dynamic_prefix(partner) + res.residual), out)
            return
        target = subformula_at(hyper.base, res.path)
        if hyper.is_abandoned(res.path):
            return
        if res.kind == "choice":
            # adversary settled a choice osubformula: jump to the matching
            # junior child of the nearest senior-rule ancestor
            d = self._nearest(node, lambda a: a.rule == rules.senior)
            self._enter(d.child_by_action(("cho", res.path, res.index)), out)
            return
        if FAMILY[target.kind] == "seq":
            d = self._nearest(node, lambda a: a.rule == rules.senior)
            self._enter(d.child_by_action(("seq", res.path, res.index - 1)), out)
            return
        # toggling switch
        if hyper.is_virgin(res.path):
            return
        d = self._nearest(
            node,
            lambda a: a.rule == rules.expansion and a.hyper.is_virgin(res.path),
        )
        groups = d.surface_groups
        idx = next(i for i, (_, hp) in enumerate(groups) if hp == res.path)
        nxt = groups[(idx + 1) % len(groups)][1]
        active = self.tracker.active(nxt)
        self._enter(d.child_by_action(("tog", nxt, active)), out)

    @staticmethod
    def _nearest(node: ANode, pred) -> ANode:
        cursor = node.parent
        while cursor is not None:
            if pred(cursor):
                return cursor
            cursor = cursor.parent
        raise CleanEnvironmentViolation("no ancestor can absorb this move")


def work_agent(tree: AnnotatedTree,
               on_jump: Optional[Callable] = None) -> StrategyAgent:
    if tree.rules is not MACHINE_RULES:
        raise ValueError("work agents come from machine-role annotations")
    return StrategyAgent(tree, on_jump)


def counterwork_agent(tree: AnnotatedTree,
                      on_jump: Optional[Callable] = None) -> StrategyAgent:
    if tree.rules is not ENVIRONMENT_RULES:
        raise ValueError("counterwork agents come from environment-role annotations")
    return StrategyAgent(tree, on_jump)


# ---------------------------------------------------------------------------
# Simple opponents

class SilentAgent:
    def __init__(self, player: Player):
        self.player = player

    def on_turn(self, position: Run) -> list[Move]:
        return []


class ScriptedAgent:
    """Plays a fixed move list, one per turn, skipping illegal leftovers."""

    def __init__(self, player: Player, moves: list[Move], spec: GameSpec):
        self.player = player
        self.queue = deque(moves)
        self.spec = spec

    def on_turn(self, position: Run) -> list[Move]:
        while self.queue:
            mv = self.queue.popleft()
            if legal(self.spec, position + ((self.player, mv),)) is None:
                return [mv]
        return []


class RandomAgent:
    """Uniform random legal play with a cap on switch moves."""

    def __init__(self, player: Player, spec: GameSpec, seed: int,
                 switch_budget: int = 3, move_prob: float = 0.8):
        self.player = player
        self.spec = spec
        self.rng = random.Random(seed)
        self.switch_budget = switch_budget
        self.move_prob = move_prob

    def on_turn(self, position: Run) -> list[Move]:
        if self.rng.random() > self.move_prob:
            return []
        options = legal_moves(self.spec, position, self.player)
        if self.switch_budget <= 0:
            options = [m for m in options if not self._is_switch(position, m)]
        if not options:
            return []
        mv = self.rng.choice(options)
        if self._is_switch(position, mv):
            self.switch_budget -= 1
        return [mv]

    def _is_switch(self, position: Run, mv: Move) -> bool:
        state = _State(self.spec)
        for p, m in position:
            state.try_move(p, m.steps)
        return _classify_is_switch(state, mv.steps)


def _classify_is_switch(state: _State, steps: tuple[int, ...]) -> bool:
    spec = state.spec
    from cl13.semantics import BoolLeaf

    if isinstance(spec, BoolLeaf):
        return False
    family = FAMILY[spec.kind]
    if family == "cho":
        if state.chosen is None:
            return False
        return _classify_is_switch(state.sub(state.chosen), steps)
    if len(steps) == 1:
        return family in ("tog", "seq")
    return _classify_is_switch(state.sub(steps[0]), steps[1:])


class MinimaxAgent:
    """Plays a winning move whenever the capped game tree offers one."""

    def __init__(self, player: Player, spec: GameSpec, switch_budget: int = 2,
                 node_limit: int = 500_000):
        self.player = player
        self.spec = spec
        self.switch_budget = switch_budget
        self.node_limit = node_limit

    def on_turn(self, position: Run) -> list[Move]:
        me = self.player
        for mv in legal_moves(self.spec, position, me):
            try:
                value = solve_bounded(
                    self.spec, self.switch_budget, self.node_limit,
                    position + ((me, mv),), to_move=me.opponent)
            except Exception:
                return []
            if value is me:
                return [mv]
        return []


# ---------------------------------------------------------------------------
# Matches

@dataclass
class MatchResult:
    run: Run
    winner: Player
    offender: Optional[Player] = None  # set when somebody moved illegally
    trace: list[int] = field(default_factory=list)
    limit: Optional[int] = None


def run_match(g: GameSpec, machine, env, budget: int = 200) -> MatchResult:
    """Alternate turns until both agents pass in a row or the budget ends."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    state = _State(g)
    run: list[LabMove] = []
    passes = 0
    agents = (machine, env)
    turn = 0
    offender = None
    while passes < 2 and len(run) < budget and offender is None:
        agent = agents[turn]
        batch = agent.on_turn(tuple(run))
        if batch:
            passes = 0
            for mv in batch:
                if not state.try_move(agent.player, mv.steps):
                    offender = agent.player
                    break
                run.append((agent.player, mv))
                if len(run) >= budget:
                    break
        else:
            passes += 1
        turn = 1 - turn
    if offender is not None:
        result_winner = offender.opponent
    else:
        result_winner = winner(g, run)
    trace, limit, tree = [], None, None
    for agent in agents:
        if hasattr(agent, "visited") and getattr(agent, "tree", None) is not None:
            trace = list(agent.visited)
            tree = agent.tree
            break
    if trace and tree is not None:
        limit = limit_node(tree, trace)
    return MatchResult(tuple(run), result_winner, offender, trace, limit)


def limit_node(tree: AnnotatedTree, trace: list[int]) -> int:
    """Deepest visited node whose last visit is followed only by descendants."""
    if not trace:
        raise ValueError("empty trace")

    def is_strict_descendant(node_id: int, ancestor_id: int) -> bool:
        cursor = tree.by_id[node_id].parent
        while cursor is not None:
            if cursor.id == ancestor_id:
                return True
            cursor = cursor.parent
        return False

    def depth(node_id: int) -> int:
        d, cursor = 0, tree.by_id[node_id].parent
        while cursor is not None:
            d, cursor = d + 1, cursor.parent
        return d

    established = []
    for node_id in set(trace):
        last = max(i for i, t in enumerate(trace) if t == node_id)
        if all(is_strict_descendant(t, node_id) for t in trace[last + 1:]):
            established.append(node_id)
    return max(established, key=depth)


# ---------------------------------------------------------------------------
# Adequacy checking

def adequacy_violations(tree: AnnotatedTree, hyper: Hyper, run: Run,
                        spec: GameSpec) -> list[str]:
    """Executable form of run-adequacy for a hyperformula.

    Checks legality, the agreement of underlines with the game's choice and
    switch state, the machine's silence inside unmatched general oliterals,
    and the copycat delay condition on matched politeral pairs.
    """
    problems: list[str] = []
    if legal(spec, run) is not None:
        problems.append("run is illegal")
        return problems
    tracker = ShapeTracker(hyper.base)
    resolutions: list[tuple[Player, Resolution]] = []
    for player, mv in run:
        try:
            resolutions.append((player, tracker.feed(player, mv.steps)))
        except CleanEnvironmentViolation as exc:
            problems.append(f"shape-level illegality: {exc}")
            return problems

    for path, node in iter_nodes(hyper.base):
        if not isinstance(node, Nary):
            continue
        family = FAMILY[node.kind]
        u = hyper.underlined_at(path)
        if family == "cho":
            chosen = tracker.chosen.get(path)
            if u is None and not hyper.is_abandoned(path) and chosen is not None:
                problems.append(f"virgin choice osubformula at {path} was chosen")
            if u is not None and chosen != u:
                problems.append(f"underlined choice {u} at {path} not chosen in run")
        elif family in ("tog", "seq"):
            if u is not None and not hyper.is_abandoned(path):
                if tracker.active(path) != u:
                    problems.append(
                        f"underline {u} at {path} but active is {tracker.active(path)}")

    if tree.rules is MACHINE_RULES:
        table = hyper.pseudo_map()
        for player, res in resolutions:
            if player is Player.MACHINE and res.kind == "inlit" and res.path not in table:
                lit = subformula_at(hyper.base, res.path)
                if isinstance(lit, Lit) and lit.atom.kind == "general":
                    problems.append(f"machine moved inside general oliteral {res.path}")

    done = set()
    for pos, (_, name) in hyper.pseudo_map().items():
        if name in done:
            continue
        done.add(name)
        neg = hyper.partner(pos)
        if neg is None or hyper.is_abandoned(pos) or hyper.is_abandoned(neg):
            continue
        theta_pos = tuple((p, Move(r.residual)) for p, r in resolutions
                          if r.kind == "inlit" and r.path == pos)
        theta_neg = tuple((p, Move(r.residual)) for p, r in resolutions
                          if r.kind == "inlit" and r.path == neg)
        flipped = tuple((p.opponent, m) for p, m in theta_neg)
        if not is_delay(theta_pos, flipped, Player.MACHINE):
            problems.append(f"matched pair at {pos}/{neg} is out of sync")
    return problems
