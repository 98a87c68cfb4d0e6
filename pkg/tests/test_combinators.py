"""Combinator protocol: outcomes, primitives, composition, and the algebra.

The algebraic laws (epsilon identity, seq associativity, many1 as
seq-then-many0) hold for the *language* -- success/failure, captures,
consumption -- not for failure reason chains, which count one "p+" per
sequence nesting level and so differ between groupings of the same
sequence. `same_behavior` below compares exactly the language part.
"""

import itertools
import random
from fractions import Fraction

import pytest

from langstack.combinators import (
    ActionError, Failure, NonProgressError, Parser, Success, TokenStream,
    any_token, char_eq, char_in, choice, descend, digit, epsilon, guard,
    is_success, many0, many1, map_action, parse_num, rest_of, result_values,
    run, satisfy, seq, symbol_eq,
)
from langstack.forms import Char, Symbol, Text, char_text, chars


def stream(text: str, at: int = 0) -> TokenStream:
    return TokenStream(chars(text), at)


def same_behavior(a, b) -> bool:
    """Language + captures equality: status, values, and rest position."""
    if is_success(a) != is_success(b):
        return False
    if is_success(a):
        return a.values == b.values and a.rest.position == b.rest.position
    return a.rest.position == b.rest.position


# --- outcomes and accessors --------------------------------------------------

def test_accessors_on_success():
    s = stream("")
    outcome = Success((Fraction(1),), s)
    assert is_success(outcome)
    assert result_values(outcome) == (Fraction(1),)
    assert rest_of(outcome) is s


def test_accessors_on_failure():
    s = stream("x")
    outcome = Failure(("EMPTY",), s)
    assert not is_success(outcome)
    assert rest_of(outcome) is s


def test_failure_reasons_come_back_as_text():
    outcome = Failure(("p+", "EMPTY"), stream(""))
    assert result_values(outcome) == (Text("p+"), Text("EMPTY"))


# --- guard and epsilon --------------------------------------------------------

def test_guard_on_empty_stream():
    assert run(guard(digit()), "") == Failure(("EMPTY",), stream(""))


def test_guard_delegates():
    outcome = run(guard(digit()), "7")
    assert outcome == Success((Char("7"),), stream("7", 1))


def test_guard_idempotent():
    assert run(guard(guard(digit())), "") == Failure(("EMPTY",), stream(""))


def test_epsilon_identity_parser():
    s = stream("xyz", 1)
    assert epsilon()(s) == Success((), s)
    assert run(epsilon(), "") == Success((), stream(""))


def test_epsilon_left_identity_for_seq():
    assert same_behavior(run(seq(epsilon(), digit()), "5"), run(digit(), "5"))


def test_choice_falls_back_to_epsilon():
    outcome = run(choice(digit(), epsilon()), "x")
    assert outcome == Success((), stream("x"))


# --- primitives ----------------------------------------------------------------

def test_char_in_sign_set():
    outcome = run(char_in("-+"), "+12")
    assert outcome == Success((Char("+"),), stream("+12", 1))


def test_symbol_eq_mismatch():
    outcome = run(symbol_eq("+"), (Symbol("*"),))
    assert isinstance(outcome, Failure)
    assert outcome.rest.position == 0


def test_digit_failure_label():
    outcome = run(digit(), "a")
    assert outcome == Failure(("pdigit",), stream("a"))


def test_primitives_fail_empty_at_end():
    for p in (char_eq("x"), char_in("ab"), digit(), symbol_eq("s"), any_token()):
        assert run(p, "") == Failure(("EMPTY",), stream(""))


def test_any_token_consumes_one():
    outcome = run(any_token(), (Symbol("a"), Symbol("b")))
    assert is_success(outcome)
    assert outcome.values == (Symbol("a"),)
    assert outcome.rest.position == 1


def test_char_eq_only_matches_chars():
    outcome = run(char_eq("a"), (Symbol("a"),))
    assert isinstance(outcome, Failure)


# --- seq -------------------------------------------------------------------------

def test_seq_two_digits():
    outcome = run(seq(digit(), digit()), "42x")
    assert outcome == Success((Char("4"), Char("2")), stream("42x", 2))


def test_seq_second_fails_restores_input():
    outcome = run(seq(digit(), digit()), "4x")
    assert outcome == Failure(("p+", "pdigit"), stream("4x"))


def test_seq_first_failure_passes_through():
    # the binary step returns the first parser's failure untouched
    outcome = run(seq(digit(), digit()), "xy")
    assert outcome == Failure(("pdigit",), stream("xy"))


def test_seq_unary_is_the_parser_itself():
    p = digit()
    assert seq(p) is p


def test_seq_needs_at_least_one():
    with pytest.raises(ValueError):
        seq()
    with pytest.raises(ValueError):
        choice()


def test_seq_reason_chain_counts_nesting():
    outcome = run(seq(digit(), digit(), digit()), "12x")
    assert outcome == Failure(("p+", "p+", "pdigit"), stream("12x"))


# --- choice ----------------------------------------------------------------------

def test_choice_tries_in_order():
    outcome = run(choice(char_eq("-"), char_eq("+")), "+3")
    assert outcome == Success((Char("+"),), stream("+3", 1))


def test_choice_left_bias():
    outcome = run(choice(digit(), epsilon()), "7")
    assert outcome == Success((Char("7"),), stream("7", 1))


def test_choice_returns_last_failure():
    outcome = run(choice(digit(), char_eq("x")), "q")
    assert outcome == Failure(("pchar",), stream("q"))


# --- repetition ---------------------------------------------------------------------

def test_many1_greedy():
    outcome = run(many1(digit()), "123.")
    assert outcome == Success((Char("1"), Char("2"), Char("3")), stream("123.", 3))


def test_many1_zero_matches_fails_unmoved():
    outcome = run(many1(digit()), ".5")
    assert outcome == Failure(("pMANY", "pdigit"), stream(".5"))


def test_many1_rejects_non_consuming_body():
    with pytest.raises(NonProgressError):
        run(many1(epsilon()), "abc")
    with pytest.raises(NonProgressError):
        run(many1(epsilon()), "")
    with pytest.raises(NonProgressError):
        run(many0(epsilon()), "abc")


def test_many0_zero_matches():
    assert run(many0(digit()), "xy") == Success((), stream("xy"))


def test_many0_equals_many1_when_matching():
    outcome = run(many0(digit()), "12")
    assert outcome == Success((Char("1"), Char("2")), stream("12", 2))


def test_many0_is_choice_of_many1_and_epsilon():
    # exhaustive over {'0','x'} streams of length <= 4
    lhs = many0(digit())
    rhs = choice(many1(digit()), epsilon())
    for n in range(5):
        for letters in itertools.product("0x", repeat=n):
            text = "".join(letters)
            assert run(lhs, text) == run(rhs, text), text


# --- map_action -------------------------------------------------------------------------

def test_map_action_folds_digits_to_number():
    join = lambda vs: (Fraction(int(char_text(vs))),)
    outcome = run(map_action(seq(digit(), digit()), join), "42")
    assert outcome == Success((Fraction(42),), stream("42", 2))


def test_map_action_identity():
    p = seq(digit(), digit())
    q = map_action(p, lambda vs: vs)
    for text in ("42", "4x", ""):
        assert run(p, text) == run(q, text)


def test_map_action_passes_failure_through():
    p = map_action(digit(), lambda vs: ())
    assert run(p, "x") == run(digit(), "x")


def test_map_action_wraps_action_errors():
    def broken(vs):
        raise KeyError("nope")
    with pytest.raises(ActionError) as err:
        run(map_action(digit(), broken, "broken"), "7")
    assert err.value.captures == (Char("7"),)


# --- descend --------------------------------------------------------------------------------

def test_descend_runs_inside_list():
    outcome = run(descend(many1(digit())), ((Char("1"), Char("2")),))
    assert is_success(outcome)
    assert outcome.values == (Char("1"), Char("2"))
    assert outcome.rest.position == 1


def test_descend_rejects_atom():
    outcome = run(descend(digit()), (Char("1"),))
    assert outcome == Failure(("plist",), TokenStream((Char("1"),), 0))


def test_descend_requires_full_consumption():
    outcome = run(descend(digit()), ((Char("1"), Char("2")),))
    assert isinstance(outcome, Failure)
    assert outcome.reasons[0] == "plist"
    assert outcome.rest.position == 0


def test_descend_empty_stream():
    assert run(descend(digit()), ()) == Failure(("EMPTY",), TokenStream((), 0))


# --- run and parse_num -------------------------------------------------------------------------

def test_run_epsilon_on_empty():
    assert run(epsilon(), ()) == Success((), TokenStream((), 0))


def test_run_guard_on_empty():
    assert run(guard(digit()), ()) == Failure(("EMPTY",), TokenStream((), 0))


def test_parse_num_consumes_signed_decimal():
    outcome = run(parse_num(), "-12.5")
    assert is_success(outcome)
    assert outcome.rest.position == 5  # all five characters


def test_determinism():
    p = seq(choice(char_eq("a"), digit()), many0(any_token()))
    s = stream("a1b")
    assert p(s) == p(s)


# --- invariants ------------------------------------------------------------------------------

_PRIMS = [char_eq("a"), char_eq("b"), char_in("ab"), char_in(".x"),
          digit(), any_token(), symbol_eq("s")]


def _random_parser(rng: random.Random, depth: int) -> Parser:
    if depth == 0:
        return rng.choice(_PRIMS)
    kind = rng.randrange(4)
    if kind == 0:
        return rng.choice(_PRIMS)
    if kind == 1:
        n = rng.randint(2, 3)
        return seq(*[_random_parser(rng, depth - 1) for _ in range(n)])
    if kind == 2:
        n = rng.randint(2, 3)
        return choice(*[_random_parser(rng, depth - 1) for _ in range(n)])
    return many1(_random_parser(rng, depth - 1))


def _random_stream(rng: random.Random) -> TokenStream:
    n = rng.randrange(7)
    source = chars("".join(rng.choice("ab01.x") for _ in range(n)))
    return TokenStream(source, rng.randint(0, n))


def test_failure_restores_input_fuzz_smoke():
    # a smaller cousin of the acceptance-scale fuzz
    rng = random.Random(7)
    for _ in range(100):
        p = _random_parser(rng, depth=4)
        for _ in range(20):
            s = _random_stream(rng)
            outcome = p(s)
            if isinstance(outcome, Failure):
                assert outcome.rest.position == s.position
            else:
                assert outcome.rest.position >= s.position  # monotone consumption


_ABC = [char_eq("a"), char_eq("b"), char_in("ab"), any_token()]


def _abc_streams(maxlen=4):
    for n in range(maxlen + 1):
        for letters in itertools.product("abc", repeat=n):
            yield stream("".join(letters))


def test_seq_associativity_language_and_values():
    for a, b, c in itertools.product(_ABC, repeat=3):
        left = seq(seq(a, b), c)
        right = seq(a, seq(b, c))
        flat = seq(a, b, c)
        for s in _abc_streams(5):
            r1, r2, r3 = left(s), right(s), flat(s)
            assert same_behavior(r1, r2)
            assert same_behavior(r1, r3)


def test_sequence_values_concatenate():
    for a, b in itertools.product(_ABC, repeat=2):
        for s in _abc_streams():
            ra = a(s)
            if not is_success(ra):
                continue
            rb = b(ra.rest)
            rseq = seq(a, b)(s)
            if is_success(rb):
                assert is_success(rseq)
                assert rseq.values == ra.values + rb.values
            else:
                assert isinstance(rseq, Failure)


def test_choice_left_bias_exhaustive():
    for a, b in itertools.product(_ABC, repeat=2):
        for s in _abc_streams():
            ra = a(s)
            if is_success(ra):
                assert choice(a, b)(s) == ra


def test_epsilon_two_sided_identity():
    for p in _ABC:
        for s in _abc_streams():
            assert same_behavior(seq(epsilon(), p)(s), p(s))
            assert same_behavior(seq(p, epsilon())(s), p(s))


def test_epsilon_absorbing_last_alternative():
    for p in _ABC:
        for s in _abc_streams():
            assert is_success(choice(p, epsilon())(s))


def test_many1_is_seq_p_many0_p():
    for p in _ABC:
        lhs = many1(p)
        rhs = seq(p, many0(p))
        for s in _abc_streams():
            assert same_behavior(lhs(s), rhs(s))
