import itertools
import random

import pytest

from gamegen import random_delay, random_gamespec, random_legal_run, random_noisy_run

from cl13.corpus import random_mixed_formula
from cl13.formula import parse
from cl13.semantics import (
    BoolLeaf,
    GNode,
    IllegalAt,
    Interpretation,
    Move,
    Player,
    dual,
    format_run,
    interpret,
    is_delay,
    legal,
    legal_moves,
    move,
    parse_run,
    project,
    solve_bounded,
    winner,
    winner_lenient,
)

M, E = Player.MACHINE, Player.ENVIRONMENT

T = BoolLeaf(True)
F = BoolLeaf(False)


def spec_of(source, elem=None, gen=None):
    return interpret(parse(source), Interpretation(elem or {}, gen or {}))


class TestInterpret:
    def test_boolean_leaves(self):
        assert spec_of("~p | p", {"p": True}) == GNode("|", (F, T))

    def test_negated_general_is_dual(self):
        p_game = GNode("!|", (T, F))
        assert spec_of("~P", gen={"P": p_game}) == GNode("!&", (F, T))

    def test_missing_binding(self):
        with pytest.raises(KeyError):
            spec_of("p")

    def test_negate_commutes_with_dual(self):
        from cl13.formula import negate

        rng = random.Random(5)
        for _ in range(150):
            f = random_mixed_formula(rng, max_connectives=5)
            itp = Interpretation(
                {n: rng.random() < 0.5 for n in ("p", "q")},
                {n: random_gamespec(rng, depth=2) for n in ("P", "Q")},
            )
            assert interpret(negate(f), itp) == dual(interpret(f, itp))


# The five-move run walked through in the toggling/choice discussion:
# (A or B) and ((C choi-and D) tog-or (E choi-and F))
SAMPLE = GNode("&", (GNode("!|", (T, F)),
                     GNode("%|", (GNode("!&", (T, F)), GNode("!&", (T, F))))))
SAMPLE_RUN = parse_run("M:1.1 E:2.1.1 M:2.2 E:2.2.2 M:2.1")


class TestLegal:
    def test_sample_run_legal(self):
        assert legal(SAMPLE, SAMPLE_RUN) is None

    def test_environment_cannot_switch_tog_or(self):
        spec = GNode("%|", (T, F))
        assert legal(spec, [(E, move(1))]) == IllegalAt(0, E)

    def test_sequential_first_switch_is_two(self):
        spec = GNode("$&", (T, T, T))
        assert legal(spec, [(E, move(3))]) == IllegalAt(0, E)
        assert legal(spec, [(E, move(2)), (E, move(3))]) is None
        assert legal(spec, [(E, move(2)), (E, move(2))]) == IllegalAt(1, E)

    def test_choice_requires_owner_and_first(self):
        spec = GNode("!|", (GNode("|", (T, F)), T))
        assert legal(spec, [(E, move(1))]) == IllegalAt(0, E)
        assert legal(spec, [(M, move(1, 1))]) == IllegalAt(0, M)  # no move before choosing

    def test_choice_continuation_unprefixed(self):
        inner = GNode("%|", (T, F))
        spec = GNode("!|", (inner, T))
        assert legal(spec, [(M, move(1)), (M, move(2))]) is None  # switch in chosen game

    def test_leaf_moves_illegal(self):
        assert legal(T, [(M, move(1))]) == IllegalAt(0, M)

    def test_dormant_moves_legal(self):
        spec = GNode("%|", (GNode("!&", (T, F)), GNode("!&", (T, F))))
        # environment plays in component 2 while 1 is active
        assert legal(spec, [(E, move(2, 1))]) is None


class TestWinner:
    def test_leaf(self):
        assert winner(T, ()) is M

    def test_choice_forfeit(self):
        assert winner(GNode("!|", (T, T)), ()) is E
        assert winner(GNode("!&", (F, F)), ()) is M

    def test_toggling_default_and_switch(self):
        spec = GNode("%|", (F, T))
        assert winner(spec, [(M, move(2))]) is M
        assert winner(spec, ()) is E

    def test_sample_run_winner(self):
        # final position: A chosen (true); toggling back on component 1 with C chosen (true)
        assert winner(SAMPLE, SAMPLE_RUN) is M

    def test_rejects_illegal(self):
        with pytest.raises(ValueError):
            winner(T, [(M, move(1))])

    def test_parallel_and(self):
        assert winner(GNode("&", (T, T)), ()) is M
        assert winner(GNode("&", (T, F)), ()) is E


class TestProject:
    def test_basic(self):
        run = parse_run("M:1.1 E:2.1.1")
        assert project(run, 2) == parse_run("E:1.1")

    def test_empty(self):
        assert project((), 3) == ()

    def test_sample_active_component(self):
        projected = project(SAMPLE_RUN, 2)
        switches = [m.steps[0] for _, m in projected if len(m.steps) == 1]
        assert switches == [2, 1]  # ends active on component 1


class TestLegalMoves:
    def test_choice_moves(self):
        spec = GNode("!|", (T, F))
        assert legal_moves(spec, (), M) == [move(1), move(2)]
        assert legal_moves(spec, (), E) == []

    def test_toggling_switches_repeatable(self):
        spec = GNode("%|", (T, F))
        moves = legal_moves(spec, (), M)
        assert move(1) in moves and move(2) in moves

    def test_leaf(self):
        assert legal_moves(T, (), M) == []

    def test_enumeration_sound_and_complete(self):
        rng = random.Random(17)
        for _ in range(120):
            spec = random_gamespec(rng)
            pos = random_legal_run(rng, spec, max_moves=5)
            for player in (M, E):
                listed = set(legal_moves(spec, pos, player))
                for mv in listed:
                    assert legal(spec, pos + ((player, mv),)) is None
                # sampled universe of unlisted candidate moves must be illegal
                for _ in range(25):
                    cand = Move(tuple(rng.randint(1, 4) for _ in range(rng.randint(1, 3))))
                    if cand in listed:
                        continue
                    assert legal(spec, pos + ((player, cand),)) is not None


class TestDelay:
    def test_reflexive(self):
        run = parse_run("M:1 E:2.1")
        assert is_delay(run, run, M)

    def test_postponed_machine_move(self):
        gamma = parse_run("M:1 E:2")
        omega = parse_run("E:2 M:1")
        assert is_delay(omega, gamma, M)

    def test_advanced_move_is_not_delay(self):
        gamma = parse_run("E:2 M:1")
        omega = parse_run("M:1 E:2")
        assert not is_delay(omega, gamma, M)

    def test_subsequences_must_match(self):
        assert not is_delay(parse_run("M:1"), parse_run("M:2"), M)

    def test_generated_delays_satisfy_predicate(self):
        rng = random.Random(23)
        for _ in range(200):
            spec = random_gamespec(rng)
            run = random_legal_run(rng, spec)
            p = rng.choice((M, E))
            omega = random_delay(rng, run, p)
            assert is_delay(omega, run, p)


class TestStaticProperty:
    def test_winner_preserved_under_delays(self):
        rng = random.Random(31)
        for _ in range(400):
            spec = random_gamespec(rng)
            run = random_legal_run(rng, spec)
            p = winner(spec, run)
            omega = random_delay(rng, run, p)
            assert winner_lenient(spec, omega) is p

    def test_illegality_delay_lemma(self):
        rng = random.Random(37)
        checked = 0
        for _ in range(500):
            spec = random_gamespec(rng)
            gamma = random_noisy_run(rng, spec)
            p = rng.choice((M, E))
            omega = random_delay(rng, gamma, p)
            verdict_o = legal(spec, omega)
            if verdict_o is not None and verdict_o.offender is p:
                checked += 1
                verdict_g = legal(spec, gamma)
                assert verdict_g is not None and verdict_g.offender is p
        assert checked > 20


class TestSolveBounded:
    def test_leaf(self):
        assert solve_bounded(T) is M

    def test_toggled_middle_true(self):
        spec = spec_of("~p %| p", {"p": True})
        assert solve_bounded(spec, switch_budget=1) is M

    def test_toggled_conjunction_intro_core(self):
        for p, q in itertools.product((False, True), repeat=2):
            spec = spec_of("~(p & q) %| (p & q)", {"p": p, "q": q})
            # machine can always end on the true side
            assert solve_bounded(spec, switch_budget=2) is M

    def test_choice_cases(self):
        assert solve_bounded(GNode("!|", (T, F))) is M
        assert solve_bounded(GNode("!&", (T, F))) is E
        assert solve_bounded(GNode("!&", (T, T))) is M

    def test_budget_zero_freezes_defaults(self):
        spec = GNode("%&", (T, F))
        assert solve_bounded(spec, switch_budget=0) is M
        assert solve_bounded(spec, switch_budget=1) is E


class TestRunFormat:
    def test_round_trip(self):
        run = parse_run("M:2.1.1 E:3")
        assert parse_run(format_run(run)) == run

    def test_bad_labmove(self):
        with pytest.raises(ValueError):
            parse_run("X:1")
