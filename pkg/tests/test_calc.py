"""The flat infix calculator: right associativity, exactness, oracle trees."""

import random
from fractions import Fraction

import pytest

from langstack.calc import (
    BinOp, InfixExpr, InfixSyntaxError, Leaf, calc, eval_infix, eval_tree,
    lex_infix, parse_infix,
)
from langstack.errors import DivisionByZeroError
from langstack.forms import Symbol

F = Fraction
PLUS, MINUS, STAR, SLASH = Symbol("+"), Symbol("-"), Symbol("*"), Symbol("/")


def test_parse_the_nested_expression():
    # 5 + ((10 / 2) - (1 / 5))
    tokens = (F(5), PLUS, ((F(10), SLASH, F(2)), MINUS, (F(1), SLASH, F(5))))
    expr = parse_infix(tokens)
    assert expr.tree == BinOp("+", Leaf(F(5)),
                              BinOp("-", BinOp("/", Leaf(F(10)), Leaf(F(2))),
                                    BinOp("/", Leaf(F(1)), Leaf(F(5)))))


def test_parse_single_number():
    assert parse_infix((F(7),)).tree == Leaf(F(7))


def test_parse_chain_is_right_associative():
    expr = parse_infix((F(2), MINUS, F(3), MINUS, F(4)))
    assert expr.tree == BinOp("-", Leaf(F(2)), BinOp("-", Leaf(F(3)), Leaf(F(4))))


def test_right_associativity_law():
    for op in (PLUS, MINUS, STAR, SLASH):
        flat = parse_infix((F(8), op, F(4), op, F(2)))
        grouped = parse_infix((F(8), op, (F(4), op, F(2))))
        assert flat.tree == grouped.tree


def test_eval_the_nested_expression():
    # 10/2 = 5, 1/5 exact, 5 - 1/5 = 24/5, 5 + 24/5 = 49/5
    tokens = (F(5), PLUS, ((F(10), SLASH, F(2)), MINUS, (F(1), SLASH, F(5))))
    assert eval_infix(parse_infix(tokens)) == F(49, 5)


def test_eval_right_associative_subtraction():
    assert eval_infix(parse_infix((F(2), MINUS, F(3), MINUS, F(4)))) == F(3)


def test_division_by_zero():
    with pytest.raises(DivisionByZeroError):
        eval_infix(parse_infix((F(1), SLASH, F(0))))


def test_malformed_token_sequences():
    with pytest.raises(InfixSyntaxError):
        parse_infix((F(1), PLUS))
    with pytest.raises(InfixSyntaxError):
        parse_infix((PLUS, F(1)))
    with pytest.raises(InfixSyntaxError):
        parse_infix(())
    with pytest.raises(InfixSyntaxError):
        parse_infix((F(1), F(2)))


def test_lex_splits_on_operators():
    assert lex_infix("(1/5)") == ((F(1), SLASH, F(5)),)
    assert lex_infix("(1 / 5)") == ((F(1), SLASH, F(5)),)
    assert lex_infix("12+3") == (F(12), PLUS, F(3))


def test_lex_errors():
    with pytest.raises(InfixSyntaxError):
        lex_infix("1 + q")
    with pytest.raises(InfixSyntaxError):
        lex_infix("(1 + 2")
    with pytest.raises(InfixSyntaxError):
        lex_infix("1 + 2)")


def test_calc_end_to_end():
    assert calc("5 + ((10 / 2)-(1 / 5))") == F(49, 5)
    assert calc("42") == F(42)
    assert calc("2 - 3 - 4") == F(3)
    assert calc("(1/3) * 3") == F(1)


# --- oracle: random trees ----------------------------------------------------

def _oracle_eval(tree) -> Fraction:
    # independent of calc.eval_tree on purpose
    if isinstance(tree, Leaf):
        return tree.value
    a, b = _oracle_eval(tree.left), _oracle_eval(tree.right)
    return {"+": a + b, "-": a - b, "*": a * b,
            "/": a / b if b != 0 else None}[tree.op]


def _random_tree(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.35:
        return Leaf(F(rng.randint(-9, 9)))
    op = rng.choice("+-*/")
    left = _random_tree(rng, depth - 1)
    right = _random_tree(rng, depth - 1)
    if op == "/":
        while _oracle_eval(right) == 0:
            right = _random_tree(rng, depth - 1)
    return BinOp(op, left, right)


def _to_text(tree) -> str:
    if isinstance(tree, Leaf):
        n = tree.value.numerator
        return str(n) if n >= 0 else f"(0 - {-n})"  # the lexer has no unary minus
    return f"({_to_text(tree.left)} {tree.op} {_to_text(tree.right)})"


def test_oracle_round_trip_500_trees():
    rng = random.Random(1729)
    for _ in range(500):
        tree = _random_tree(rng, depth=4)
        expected = _oracle_eval(tree)
        assert calc(_to_text(tree)) == expected


def test_parenthesization_invariance():
    rng = random.Random(4104)
    for _ in range(100):
        text = _to_text(_random_tree(rng, depth=3))
        assert calc(f"({text})") == calc(text)


def test_eval_tree_direct():
    assert eval_tree(BinOp("*", Leaf(F(3)), Leaf(F(1, 3)))) == F(1)
