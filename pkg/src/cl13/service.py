"""HTTP play service: create a session, watch the board, move as the human.

The human normally plays the environment against a machine strategy
extracted from a proof; for refutable elementary-base formulas the roles
can be swapped, with the service driving the counterstrategy.  All legality
and winner facts come from the game runtime; the view is derived data.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from cl13.corpus import MOLECULE_VARIANTS
from cl13.formula import (
    FAMILY,
    Formula,
    Nary,
    atom_names,
    classify,
    iter_nodes,
    parse,
    text,
)
from cl13.prover import Provable, decide_cl13, decide_cl14bar
from cl13.semantics import (
    GameSpec,
    Interpretation,
    LabMove,
    Move,
    Player,
    _State,
    format_run,
    formula_to_spec,
    interpret,
    legal_moves,
    molecule_spec,
    winner,
)
from cl13.strategy import (
    StrategyAgent,
    annotate,
    counterwork_agent,
    work_agent,
)


class CreateSession(BaseModel):
    formula: str
    interpretation: dict[str, object] = {}
    budget: int = 200
    mode: str = "auto"  # "work" | "counterwork" | "auto"


class PostMove(BaseModel):
    move: str


@dataclass
class Session:
    id: str
    formula: Formula
    spec: GameSpec
    itp: Interpretation
    agent: StrategyAgent
    human: Player
    budget: int
    run: list[LabMove] = field(default_factory=list)
    state: _State = None
    passes: int = 0
    finished: bool = False
    winner: Optional[Player] = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    def view(self) -> dict:
        tree = []
        chosen_map, switch_map = _game_marks(self)
        for path, node in iter_nodes(self.formula):
            entry = {
                "id": ".".join(map(str, path)) or "root",
                "path": list(path),
            }
            if isinstance(node, Nary):
                entry["kind"] = node.kind
                entry["children"] = [
                    ".".join(map(str, path + (i,))) or "root"
                    for i in range(1, len(node.children) + 1)
                ]
                if FAMILY[node.kind] in ("tog", "seq"):
                    entry["active"] = switch_map.get(path, 1)
                if FAMILY[node.kind] == "cho":
                    entry["chosen"] = chosen_map.get(path)
            else:
                entry["kind"] = "leaf"
                entry["text"] = text(node)
            entry["abandoned"] = _is_abandoned(self, path, chosen_map, switch_map)
            tree.append(entry)
        return {
            "id": self.id,
            "formula": text(self.formula),
            "human": self.human.value,
            "tree": tree,
            "moves": [f"{p.value}:{m}" for p, m in self.run],
            "legal": [] if self.finished else
                     [str(m) for m in legal_moves(self.spec, self.run, self.human)],
            "finished": self.finished,
            "winner": self.winner.value if self.winner else None,
            "budget_left": self.budget - len(self.run),
        }


def _game_marks(session: Session):
    """Choice and active-component marks at formula level, from the run."""
    from cl13.strategy import ShapeTracker

    tracker = ShapeTracker(session.formula)
    for player, mv in session.run:
        tracker.feed(player, mv.steps)
    switch_map = {p: (sw[-1] if sw else 1) for p, sw in tracker.switches.items()}
    return dict(tracker.chosen), switch_map


def _is_abandoned(session: Session, path, chosen_map, switch_map) -> bool:
    node = session.formula
    for depth, step in enumerate(path):
        prefix = path[:depth]
        if isinstance(node, Nary):
            family = FAMILY[node.kind]
            if family == "cho":
                ch = chosen_map.get(prefix)
                if ch is not None and step != ch:
                    return True
            if family == "seq" and step < switch_map.get(prefix, 1):
                return True
            node = node.children[step - 1]
    return False


def build_interpretation(f: Formula, bindings: dict[str, object]) -> Interpretation:
    """Total interpretation from user bindings plus friendly defaults."""
    elem: dict[str, bool] = {}
    gen: dict[str, GameSpec] = {}
    for name in sorted(atom_names(f, "elementary")):
        value = bindings.get(name, True)
        if isinstance(value, str):
            value = value.strip().lower() in ("true", "1", "yes")
        elem[name] = bool(value)
    for name in sorted(atom_names(f, "general")):
        value = bindings.get(name)
        if value is None:
            gen[name] = molecule_spec(MOLECULE_VARIANTS[2])
        elif isinstance(value, str):
            gen[name] = formula_to_spec(parse(value))
        else:
            raise ValueError(f"binding for {name} must be a game spec string")
    return Interpretation(elem, gen)


def start_session(request: CreateSession) -> Session:
    f = parse(request.formula)
    itp = build_interpretation(f, request.interpretation)
    spec = interpret(f, itp)
    mode = request.mode
    if mode == "auto":
        mode = "work" if isinstance(decide_cl13(f), Provable) else "counterwork"
    if mode == "work":
        verdict = decide_cl13(f)
        if not isinstance(verdict, Provable):
            raise ValueError("formula is not CL13-provable; no machine strategy")
        agent = work_agent(annotate(verdict.tree, role="machine"))
        human = Player.ENVIRONMENT
    elif mode == "counterwork":
        if not classify(f).is_elementary_base:
            raise ValueError("counterstrategies need an elementary-base formula")
        verdict = decide_cl14bar(f)
        if not isinstance(verdict, Provable):
            raise ValueError("formula is CL14-provable; no counterstrategy")
        agent = counterwork_agent(annotate(verdict.tree, role="environment"))
        human = Player.MACHINE
    else:
        raise ValueError(f"unknown mode {request.mode!r}")
    session = Session(
        id=uuid.uuid4().hex[:12],
        formula=f,
        spec=spec,
        itp=itp,
        agent=agent,
        human=human,
        budget=max(1, request.budget),
    )
    session.state = _State(spec)
    _agent_turn(session)
    return session


def _apply(session: Session, player: Player, mv: Move) -> bool:
    if len(session.run) >= session.budget:
        return False
    if not session.state.try_move(player, mv.steps):
        return False
    session.run.append((player, mv))
    return True


def _agent_turn(session: Session):
    batch = session.agent.on_turn(tuple(session.run))
    moved = False
    for mv in batch:
        if not _apply(session, session.agent.player, mv):
            break
        moved = True
    if moved:
        session.passes = 0
    else:
        session.passes += 1
        if session.passes >= 2:
            _finish(session)
    if len(session.run) >= session.budget:
        _finish(session)


def _finish(session: Session):
    if not session.finished:
        session.finished = True
        session.winner = winner(session.spec, session.run)


def human_move(session: Session, source: str) -> dict:
    if session.finished:
        raise LookupError("session is finished")
    source = source.strip()
    if source == "pass":
        session.passes += 1
        if session.passes >= 2:
            _finish(session)
        else:
            _agent_turn(session)
        return session.view()
    try:
        mv = Move(tuple(int(s) for s in source.split(".")))
    except ValueError:
        raise ValueError(f"malformed move {source!r}")
    if not _apply(session, session.human, mv):
        raise ValueError(f"illegal move {source!r} in the current position")
    session.passes = 0
    if len(session.run) >= session.budget:
        _finish(session)
    else:
        _agent_turn(session)
    return session.view()


def transcript_text(session: Session) -> str:
    lines = [
        f"formula: {text(session.formula)}",
        f"interpretation: {_itp_text(session.itp)}",
        f"machine: {'work' if session.human is Player.ENVIRONMENT else 'human'}",
        f"env: {'human' if session.human is Player.ENVIRONMENT else 'counterwork'}",
        f"budget: {session.budget}",
        f"run: {format_run(session.run)}",
        f"winner: {session.winner.value if session.winner else '?'}",
        f"trace: {' '.join(map(str, session.agent.visited))}",
    ]
    return "\n".join(lines) + "\n"


def _itp_text(itp: Interpretation) -> str:
    parts = [f"{k}={str(v).lower()}" for k, v in sorted(itp.elem.items())]
    parts += [f"{k}=<game>" for k in sorted(itp.gen)]
    return " ".join(parts)


def create_app(transcript_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="cl13 play service")
    sessions: dict[str, Session] = {}

    def get(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"no session {session_id}")
        return session

    @app.post("/session")
    def create(request: CreateSession):
        try:
            session = start_session(request)
        except Exception as exc:
            raise HTTPException(422, str(exc))
        sessions[session.id] = session
        return session.view()

    @app.get("/session/{session_id}")
    def view(session_id: str):
        session = get(session_id)
        with session.lock:
            return session.view()

    @app.get("/session/{session_id}/legal")
    def legal_list(session_id: str):
        session = get(session_id)
        with session.lock:
            if session.finished:
                return {"moves": []}
            return {"moves": [str(m) for m in
                              legal_moves(session.spec, session.run, session.human)]}

    @app.post("/session/{session_id}/move")
    def post_move(session_id: str, body: PostMove):
        session = get(session_id)
        with session.lock:
            try:
                result = human_move(session, body.move)
            except LookupError as exc:
                raise HTTPException(409, str(exc))
            except ValueError as exc:
                raise HTTPException(422, str(exc))
            if session.finished and transcript_dir:
                path = FsPath(transcript_dir) / f"{session.id}.transcript"
                path.write_text(transcript_text(session))
            return result

    return app
