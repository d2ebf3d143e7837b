"""Command-line frontend.

Exit codes: 0 success, 1 failed check or lost verdict expectation, 2 input
errors, 3 search/resource budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path as FsPath

from cl13 import corpus as corpus_mod
from cl13.formula import Nary, ParseError, parse, text
from cl13.prover import (
    Provable,
    SearchLimitExceeded,
    check_proof,
    decide_cl13,
    decide_cl14,
    decide_cl14bar,
    read_proof,
    write_proof,
)
from cl13.semantics import (
    GameTreeBudgetExceeded,
    Player,
    format_run,
    interpret,
    legal_moves,
    solve_bounded,
)
from cl13.service import build_interpretation, human_move, start_session, CreateSession, transcript_text
from cl13.strategy import RandomAgent, annotate, run_match, work_agent

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _parse_bindings(pairs: list[str]) -> dict[str, object]:
    out: dict[str, object] = {}
    for pair in pairs or []:
        name, _, value = pair.partition("=")
        if not name or not value:
            raise ValueError(f"bad binding {pair!r}; use name=value")
        out[name.strip()] = value.strip()
    return out


def _load_interpretation_file(path: str) -> dict[str, object]:
    out: dict[str, object] = {}
    for line in FsPath(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, _, value = line.partition("=")
        out[name.strip()] = value.strip()
    return out


def cmd_parse(args) -> int:
    print(text(parse(args.formula)))
    return EXIT_OK


def cmd_decide(args) -> int:
    f = parse(args.formula)
    decide = {
        "cl13": lambda g: decide_cl13(g, claim45_pruning=args.claim45_pruning,
                                      budget=args.budget),
        "cl14": lambda g: decide_cl14(g, budget=args.budget),
        "cl14bar": lambda g: decide_cl14bar(g, budget=args.budget),
    }[args.system]
    verdict = decide(f)
    if isinstance(verdict, Provable):
        print("provable")
        if args.proof:
            FsPath(args.proof).write_text(write_proof(verdict.tree))
    else:
        print("unprovable")
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        root = read_proof(FsPath(args.prooffile).read_text())
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    errors = check_proof(root)
    if errors:
        for err in errors:
            print(f"node {err.node_id}: {err.reason}", file=sys.stderr)
        return EXIT_FAIL
    print("ok")
    return EXIT_OK


def cmd_corpus(args) -> int:
    failures = 0
    for entry in corpus_mod.CORPUS:
        verdict = decide_cl13(entry.formula, budget=args.budget)
        got = isinstance(verdict, Provable)
        mark = "ok" if got == entry.cl13_provable else "MISMATCH"
        if got != entry.cl13_provable:
            failures += 1
        print(f"{mark:8s} {'provable' if got else 'unprovable':10s} {entry.name}: {entry.source}")
    print(f"{len(corpus_mod.CORPUS)} formulas, {failures} mismatches")
    return EXIT_OK if failures == 0 else EXIT_FAIL


def cmd_oracle(args) -> int:
    f = parse(args.formula)
    bindings = _parse_bindings(args.bind)
    if args.interp:
        bindings = {**_load_interpretation_file(args.interp), **bindings}
    itp = build_interpretation(f, bindings)
    spec = interpret(f, itp)
    value = solve_bounded(spec, switch_budget=args.switch_budget)
    print(f"best-play winner (switch budget {args.switch_budget}): "
          f"{'machine' if value is Player.MACHINE else 'environment'}")
    return EXIT_OK


def cmd_arena(args) -> int:
    config = json.loads(FsPath(args.config).read_text())
    budget = config.get("budget", 200)
    seeds = config.get("seeds", 20)
    switch_budget = config.get("switch_budget", 3)
    transcripts = FsPath(args.transcripts) if args.transcripts else None
    if transcripts:
        transcripts.mkdir(parents=True, exist_ok=True)
    total = losses = 0
    for source in config["formulas"]:
        f = parse(source)
        verdict = decide_cl13(f)
        if not isinstance(verdict, Provable):
            print(f"skip (unprovable): {source}")
            continue
        tree = annotate(verdict.tree, role="machine")
        for itp_index, itp in enumerate(corpus_mod.interpretations_for(f)):
            spec = interpret(f, itp)
            for seed in range(seeds):
                agent = work_agent(tree)
                env = RandomAgent(Player.ENVIRONMENT, spec, seed,
                                  switch_budget=switch_budget)
                result = run_match(spec, agent, env, budget=budget)
                total += 1
                if result.winner is not Player.MACHINE:
                    losses += 1
                if transcripts:
                    name = f"arena_{total:05d}.transcript"
                    (transcripts / name).write_text(_match_transcript(
                        source, itp, seed, budget, result))
        print(f"done: {source}")
    print(f"{total} matches, {losses} machine losses")
    return EXIT_OK if losses == 0 else EXIT_FAIL


def _match_transcript(source, itp, seed, budget, result) -> str:
    elem = " ".join(f"{k}={str(v).lower()}" for k, v in sorted(itp.elem.items()))
    gen = " ".join(f"{k}=<molecule>" for k in sorted(itp.gen))
    lines = [
        f"formula: {source}",
        f"interpretation: {elem} {gen}".strip(),
        "machine: work",
        f"env: random(seed={seed})",
        f"budget: {budget}",
        f"run: {format_run(result.run)}",
        f"winner: {result.winner.value}",
        f"trace: {' '.join(map(str, result.trace))}",
        f"limit: {result.limit if result.limit is not None else '-'}",
    ]
    return "\n".join(lines) + "\n"


def cmd_play(args) -> int:
    if args.serve:
        import uvicorn

        from cl13.service import create_app

        uvicorn.run(create_app(args.transcripts), host=args.host, port=args.port)
        return EXIT_OK
    if not args.formula:
        print("error: --formula is required for --tty play", file=sys.stderr)
        return EXIT_USAGE
    bindings = _parse_bindings(args.bind)
    if args.interp:
        bindings = {**_load_interpretation_file(args.interp), **bindings}
    request = CreateSession(
        formula=args.formula,
        interpretation=bindings,
        budget=args.budget,
        mode="counterwork" if args.counter else "auto",
    )
    session = start_session(request)
    print(f"playing {text(session.formula)}; you are "
          f"{'the environment' if session.human is Player.ENVIRONMENT else 'the machine'}")
    while not session.finished:
        _print_position(session)
        options = legal_moves(session.spec, session.run, session.human)
        print("legal moves:", ", ".join(map(str, options)) or "(none)")
        try:
            line = input("move (or pass/quit)> ").strip()
        except EOFError:
            line = "quit"
        if line == "quit":
            print("aborted")
            return EXIT_OK
        try:
            human_move(session, line or "pass")
        except (ValueError, LookupError) as exc:
            print(f"rejected: {exc}")
    _print_position(session)
    print(f"finished; winner: "
          f"{'machine' if session.winner is Player.MACHINE else 'environment'}")
    if args.transcripts:
        out = FsPath(args.transcripts) / f"{session.id}.transcript"
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(transcript_text(session))
        print(f"transcript written to {out}")
    return EXIT_OK


def _print_position(session) -> None:
    view = session.view()
    marks = {tuple(n["path"]): n for n in view["tree"]}

    def render(node, path, depth):
        pad = "  " * depth
        info = marks[path]
        if isinstance(node, Nary):
            extra = ""
            if "active" in info:
                extra = f" active={info['active']}"
            if info.get("chosen"):
                extra = f" chosen={info['chosen']}"
            if info.get("abandoned"):
                extra += " (abandoned)"
            print(f"{pad}{node.kind}{extra}  [{'.'.join(map(str, path)) or 'root'}]")
            for i, child in enumerate(node.children, 1):
                render(child, path + (i,), depth + 1)
        else:
            flag = " (abandoned)" if info.get("abandoned") else ""
            print(f"{pad}{text(node)}{flag}  [{'.'.join(map(str, path)) or 'root'}]")

    print("moves so far:", " ".join(view["moves"]) or "(none)")
    render(session.formula, (), 0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cl13",
        description="workbench for the propositional logic CL13",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="echo the canonical form of a formula")
    p.add_argument("formula")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("decide", help="decide provability")
    p.add_argument("formula")
    p.add_argument("--system", choices=("cl13", "cl14", "cl14bar"), default="cl13")
    p.add_argument("--proof", help="write the proof file here when provable")
    p.add_argument("--claim45-pruning", action="store_true")
    p.add_argument("--budget", type=int, default=10 ** 6)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("check", help="check a proof file")
    p.add_argument("prooffile")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("corpus", help="decide the built-in corpus and compare")
    p.add_argument("--budget", type=int, default=10 ** 6)
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("oracle", help="bounded minimax winner for a position")
    p.add_argument("formula")
    p.add_argument("--bind", action="append", help="atom=value (repeatable)")
    p.add_argument("--interp", help="interpretation file")
    p.add_argument("--switch-budget", type=int, default=2)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("arena", help="batch matches from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--transcripts")
    p.set_defaults(func=cmd_arena)

    p = sub.add_parser("play", help="interactive match (human = environment)")
    p.add_argument("--tty", action="store_true", help="terminal play (default)")
    p.add_argument("--serve", action="store_true", help="run the HTTP service")
    p.add_argument("--formula")
    p.add_argument("--bind", action="append")
    p.add_argument("--interp")
    p.add_argument("--counter", action="store_true",
                   help="play the machine against a counterstrategy")
    p.add_argument("--budget", type=int, default=200)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--transcripts")
    p.set_defaults(func=cmd_play)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SearchLimitExceeded, GameTreeBudgetExceeded) as exc:
        print(f"resource budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
