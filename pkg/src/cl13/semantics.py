"""Constant-game runtime: legality, winners, projections, delays, minimax.

A game spec has the shape of a formula but boolean leaves; negation is
compiled away by dualisation.  Moves are dot-paths of 1-based indices whose
final component is the token: a switch at a toggling/sequential node, a
choice at a choice node, or a leaf-game move.  After a choice is made the
chosen component's moves continue at the same address with no extra prefix.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from cl13.formula import (
    CHO_AND,
    CHO_OR,
    DUAL_KIND,
    FAMILY,
    SEQ_AND,
    TOG_AND,
    Bot,
    Formula,
    Lit,
    Nary,
    Top,
)


class Player(enum.Enum):
    MACHINE = "M"
    ENVIRONMENT = "E"

    @property
    def opponent(self) -> "Player":
        return Player.ENVIRONMENT if self is Player.MACHINE else Player.MACHINE

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Move:
    steps: tuple[int, ...]

    def __post_init__(self):
        if not self.steps or any(s < 1 for s in self.steps):
            raise ValueError("a move is a nonempty sequence of 1-based indices")

    @property
    def path(self) -> tuple[int, ...]:
        return self.steps[:-1]

    @property
    def token(self) -> int:
        return self.steps[-1]

    def __str__(self):
        return ".".join(str(s) for s in self.steps)


LabMove = tuple[Player, Move]
Run = tuple[LabMove, ...]


def move(*steps: int) -> Move:
    return Move(tuple(steps))


def parse_run(source: str) -> Run:
    """Whitespace-separated labmoves like `M:2.1.1 E:3`."""
    out = []
    for tok in source.split():
        tag, _, rest = tok.partition(":")
        player = {"M": Player.MACHINE, "E": Player.ENVIRONMENT}.get(tag)
        if player is None or not rest:
            raise ValueError(f"bad labmove {tok!r}")
        out.append((player, Move(tuple(int(s) for s in rest.split(".")))))
    return tuple(out)


def format_run(run: Iterable[LabMove]) -> str:
    return " ".join(f"{p.value}:{m}" for p, m in run)


# ---------------------------------------------------------------------------
# Game specs

@dataclass(frozen=True)
class BoolLeaf:
    value: bool


@dataclass(frozen=True)
class GNode:
    kind: str
    children: tuple["GameSpec", ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("game nodes need at least 2 children")


GameSpec = Union[BoolLeaf, GNode]


def dual(g: GameSpec) -> GameSpec:
    if isinstance(g, BoolLeaf):
        return BoolLeaf(not g.value)
    return GNode(DUAL_KIND[g.kind], tuple(dual(c) for c in g.children))


# Owner of switch/choice tokens per node kind: disjunctions belong to the
# machine, conjunctions to the environment.
def owner(kind: str) -> Player:
    return Player.ENVIRONMENT if kind in (TOG_AND, SEQ_AND, CHO_AND) else Player.MACHINE


@dataclass(frozen=True)
class Interpretation:
    elem: dict[str, bool] = field(default_factory=dict)
    gen: dict[str, GameSpec] = field(default_factory=dict)


def interpret(f: Formula, itp: Interpretation) -> GameSpec:
    """Substitute atoms by their games; negated literals contribute duals."""
    if isinstance(f, Top):
        return BoolLeaf(True)
    if isinstance(f, Bot):
        return BoolLeaf(False)
    if isinstance(f, Lit):
        name = f.atom.name
        if f.atom.kind == "elementary":
            if name not in itp.elem:
                raise KeyError(f"no binding for elementary atom {name}")
            return BoolLeaf(itp.elem[name] != f.negated)
        if name not in itp.gen:
            raise KeyError(f"no binding for general atom {name}")
        spec = itp.gen[name]
        return dual(spec) if f.negated else spec
    return GNode(f.kind, tuple(interpret(c, itp) for c in f.children))


def formula_to_spec(f: Formula) -> GameSpec:
    """Closed formulas over constants double as game-spec syntax."""
    return interpret(f, Interpretation())


def molecule_spec(rows: list[list[bool]]) -> GameSpec:
    """A choice-of-choices game: conjunction of disjunctions of booleans."""
    return GNode(CHO_AND, tuple(
        GNode(CHO_OR, tuple(BoolLeaf(v) for v in row)) for row in rows
    ))


# ---------------------------------------------------------------------------
# Legality

@dataclass(frozen=True)
class IllegalAt:
    index: int
    offender: Player


LEGAL = None  # legal() returns None when every move is fine


class _State:
    """Mutable per-node play state; mirrors the spec tree lazily."""

    __slots__ = ("spec", "chosen", "switches", "subs")

    def __init__(self, spec: GameSpec):
        self.spec = spec
        self.chosen: Optional[int] = None  # choice nodes
        self.switches: list[int] = []      # toggling/sequential nodes
        self.subs: dict[int, _State] = {}

    def sub(self, i: int) -> "_State":
        if i not in self.subs:
            self.subs[i] = _State(self.spec.children[i - 1])
        return self.subs[i]

    def try_move(self, player: Player, steps: tuple[int, ...]) -> bool:
        spec = self.spec
        if isinstance(spec, BoolLeaf):
            return False
        n = len(spec.children)
        family = FAMILY[spec.kind]
        if family == "cho":
            if self.chosen is None:
                if len(steps) == 1 and player is owner(spec.kind) and 1 <= steps[0] <= n:
                    self.chosen = steps[0]
                    return True
                return False
            return self.sub(self.chosen).try_move(player, steps)
        if len(steps) == 1:
            if family == "par":
                return False
            i = steps[0]
            if player is not owner(spec.kind) or not 1 <= i <= n:
                return False
            if family == "seq" and i != len(self.switches) + 2:
                return False
            self.switches.append(i)
            return True
        i = steps[0]
        if not 1 <= i <= n:
            return False
        return self.sub(i).try_move(player, steps[1:])

    @property
    def active(self) -> int:
        return self.switches[-1] if self.switches else 1


def legal(g: GameSpec, run: Iterable[LabMove]):
    """None when legal, else IllegalAt for the first offending move."""
    state = _State(g)
    for index, (player, mv) in enumerate(run):
        if not state.try_move(player, mv.steps):
            return IllegalAt(index, player)
    return LEGAL


def replay(g: GameSpec, run: Iterable[LabMove]) -> _State:
    state = _State(g)
    for index, (player, mv) in enumerate(run):
        if not state.try_move(player, mv.steps):
            raise ValueError(f"illegal move at {index}")
    return state


# ---------------------------------------------------------------------------
# Winner

def winner(g: GameSpec, run: Iterable[LabMove]) -> Player:
    """Winner of a legal finite run."""
    run = tuple(run)
    verdict = legal(g, run)
    if verdict is not None:
        raise ValueError(f"illegal run: {verdict}")
    return _winner(g, [(p, m.steps) for p, m in run])


def _winner(g: GameSpec, moves: list[tuple[Player, tuple[int, ...]]]) -> Player:
    if isinstance(g, BoolLeaf):
        return Player.MACHINE if g.value else Player.ENVIRONMENT

    def proj(i: int):
        return [(p, s[1:]) for p, s in moves if len(s) >= 2 and s[0] == i]

    family = FAMILY[g.kind]
    if family == "par":
        results = [
            _winner(child, proj(i)) for i, child in enumerate(g.children, start=1)
        ]
        if g.kind == "&":
            return (Player.MACHINE if all(r is Player.MACHINE for r in results)
                    else Player.ENVIRONMENT)
        return (Player.MACHINE if any(r is Player.MACHINE for r in results)
                else Player.ENVIRONMENT)
    if family in ("tog", "seq"):
        switches = [s[0] for _, s in moves if len(s) == 1]
        active = switches[-1] if switches else 1
        return _winner(g.children[active - 1], proj(active))
    # choice: the owner loses by not choosing
    who = owner(g.kind)
    if not moves:
        return who.opponent
    first = moves[0][1]
    assert len(first) == 1, "legal runs choose before playing inside"
    return _winner(g.children[first[0] - 1], [(p, s) for p, s in moves[1:]])


def winner_lenient(g: GameSpec, run: Iterable[LabMove]) -> Player:
    """Winner where an illegal run is lost by the player who broke it first."""
    run = tuple(run)
    verdict = legal(g, run)
    if verdict is not None:
        return verdict.offender.opponent
    return winner(g, run)


def project(run: Iterable[LabMove], prefix: int) -> Run:
    """Moves of component `prefix`, with that step stripped."""
    return tuple(
        (p, Move(m.steps[1:]))
        for p, m in run
        if len(m.steps) >= 2 and m.steps[0] == prefix
    )


# ---------------------------------------------------------------------------
# Legal-move enumeration

def legal_moves(g: GameSpec, position: Iterable[LabMove], by: Player) -> list[Move]:
    """All single legal moves for `by` after a legal position."""
    state = replay(g, position)
    out: list[Move] = []

    def walk(st: _State, prefix: tuple[int, ...]):
        spec = st.spec
        if isinstance(spec, BoolLeaf):
            return
        n = len(spec.children)
        family = FAMILY[spec.kind]
        if family == "cho":
            if st.chosen is None:
                if by is owner(spec.kind):
                    out.extend(Move(prefix + (i,)) for i in range(1, n + 1))
                return
            walk(st.sub(st.chosen), prefix)
            return
        if family == "tog" and by is owner(spec.kind):
            out.extend(Move(prefix + (i,)) for i in range(1, n + 1))
        if family == "seq" and by is owner(spec.kind):
            nxt = len(st.switches) + 2
            if nxt <= n:
                out.append(Move(prefix + (nxt,)))
        for i in range(1, n + 1):
            walk(st.sub(i), prefix + (i,))

    walk(state, ())
    return out


# ---------------------------------------------------------------------------
# Delays

def is_delay(omega: Iterable[LabMove], gamma: Iterable[LabMove], p: Player) -> bool:
    """True when omega only postpones p's moves relative to gamma.

    Both players make the same moves in the same order; and whenever the
    k-th p-move comes after the n-th adversary move in gamma, it still does
    in omega.
    """
    omega, gamma = tuple(omega), tuple(gamma)
    for who in Player:
        if [m for q, m in omega if q is who] != [m for q, m in gamma if q is who]:
            return False

    def positions(run):
        mine, theirs = [], []
        for idx, (q, _) in enumerate(run):
            (mine if q is p else theirs).append(idx)
        return mine, theirs

    mine_g, theirs_g = positions(gamma)
    mine_o, theirs_o = positions(omega)
    for k, gk in enumerate(mine_g):
        for n, gn in enumerate(theirs_g):
            if gk > gn and not mine_o[k] > theirs_o[n]:
                return False
    return True


# ---------------------------------------------------------------------------
# Bounded minimax oracle

class GameTreeBudgetExceeded(RuntimeError):
    pass


def solve_bounded(
    g: GameSpec,
    switch_budget: int = 2,
    node_limit: int = 2_000_000,
    position: Iterable[LabMove] = (),
    to_move: Player = Player.MACHINE,
) -> Player:
    """Winner with optimal play in the switch-capped finite game.

    Moving alternates machine-first; each turn is one move or a pass and two
    consecutive passes end the game.  Toggling and sequential nodes accept at
    most switch_budget switches each.
    """
    if switch_budget < 0:
        raise ValueError("switch budget must be >= 0")
    state = replay(g, position)
    memo: dict = {}
    visits = 0

    def state_key(st: _State):
        spec = st.spec
        if isinstance(spec, BoolLeaf):
            return ()
        n = len(spec.children)
        kids = tuple(
            state_key(st.subs[i]) if i in st.subs else None for i in range(1, n + 1)
        )
        if FAMILY[spec.kind] == "cho":
            return (st.chosen, kids)
        return (len(st.switches), st.active, kids)

    def moves_for(st: _State, by: Player, prefix: tuple[int, ...]) -> list[tuple[int, ...]]:
        spec = st.spec
        if isinstance(spec, BoolLeaf):
            return []
        n = len(spec.children)
        family = FAMILY[spec.kind]
        out = []
        if family == "cho":
            if st.chosen is None:
                if by is owner(spec.kind):
                    out.extend(prefix + (i,) for i in range(1, n + 1))
                return out
            return moves_for(st.sub(st.chosen), by, prefix)
        if family in ("tog", "seq") and by is owner(spec.kind):
            if len(st.switches) < switch_budget:
                if family == "tog":
                    out.extend(prefix + (i,) for i in range(1, n + 1))
                else:
                    nxt = len(st.switches) + 2
                    if nxt <= n:
                        out.append(prefix + (nxt,))
        for i in range(1, n + 1):
            out.extend(moves_for(st.sub(i), by, prefix + (i,)))
        return out

    def eval_state(st: _State) -> Player:
        spec = st.spec
        if isinstance(spec, BoolLeaf):
            return Player.MACHINE if spec.value else Player.ENVIRONMENT
        family = FAMILY[spec.kind]
        n = len(spec.children)
        if family == "par":
            results = [eval_state(st.sub(i)) for i in range(1, n + 1)]
            good = all if spec.kind == "&" else any
            return (Player.MACHINE if good(r is Player.MACHINE for r in results)
                    else Player.ENVIRONMENT)
        if family in ("tog", "seq"):
            return eval_state(st.sub(st.active))
        if st.chosen is None:
            return owner(spec.kind).opponent
        return eval_state(st.sub(st.chosen))

    def value(st: _State, to_move: Player, passed: bool) -> Player:
        nonlocal visits
        key = (state_key(st), to_move, passed)
        if key in memo:
            return memo[key]
        visits += 1
        if visits > node_limit:
            raise GameTreeBudgetExceeded(f"over {node_limit} states")
        result = None
        for steps in moves_for(st, to_move, ()):
            child = _copy_state(st)
            ok = child.try_move(to_move, steps)
            assert ok, steps
            if value(child, to_move.opponent, False) is to_move:
                result = to_move
                break
        if result is None:
            if passed:
                result = eval_state(st)
            else:
                result = value(st, to_move.opponent, True)
        memo[key] = result
        return result

    return value(state, to_move, False)


def _copy_state(st: _State) -> _State:
    new = _State(st.spec)
    new.chosen = st.chosen
    new.switches = list(st.switches)
    new.subs = {i: _copy_state(s) for i, s in st.subs.items()}
    return new
