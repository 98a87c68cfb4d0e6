"""Infix arithmetic over forms: ``+ - * /`` on exact rationals.

The grammar is deliberately flat and right-recursive::

    epr  := (body "+" epr) :-> add / (body "-" epr) :-> sub
          / (body "*" epr) :-> mul / (body "/" epr) :-> div / body ;
    body := num / @( epr ) ;

All four operators share one precedence level and chains associate to the
RIGHT, so ``2 - 3 - 4`` means ``2 - (3 - 4)`` = 3. Parentheses (nested
lists at the form level) are the only way to group. This is the faithful
semantics of the flat epr/body grammar; the Pascal-ish language in
pasqualish.py has conventional precedence instead.

Division is exact: ``1 / 5`` is the rational 1/5, not a float.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .combinators import Parser, Success, run, satisfy
from .errors import DivisionByZeroError, PositionedError
from .forms import Form, Symbol, render
from .grammar import ParserEnv, compile_grammar, parse_grammar

__all__ = [
    "Leaf", "BinOp", "InfixExpr", "InfixSyntaxError",
    "parse_infix", "eval_infix", "eval_tree", "calc", "lex_infix",
]

OPS = ("+", "-", "*", "/")


class InfixSyntaxError(PositionedError):
    stage = "parse"


@dataclass(frozen=True)
class Leaf:
    value: Fraction


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Leaf | BinOp"
    right: "Leaf | BinOp"


@dataclass(frozen=True)
class InfixExpr:
    """The raw token sequence together with its parse tree."""

    tokens: tuple[Form, ...]
    tree: Leaf | BinOp


_GRAMMAR_TEXT = """
epr  := (body "+" epr) :-> add
      / (body "-" epr) :-> sub
      / (body "*" epr) :-> mul
      / (body "/" epr) :-> div
      / body ;
body := num / @( epr ) ;
"""


def _binop_action(op: str):
    sym = Symbol(op)

    def build(vs):
        return ((sym, vs[0], vs[2]),)
    return build


def _calc_env() -> ParserEnv:
    return ParserEnv.default(
        parsers={"num": satisfy(lambda f: isinstance(f, Fraction), "pnum")},
        actions={"add": _binop_action("+"), "sub": _binop_action("-"),
                 "mul": _binop_action("*"), "div": _binop_action("/")},
    )


_PARSER: Parser | None = None


def _parser() -> Parser:
    global _PARSER
    if _PARSER is None:
        env = _calc_env()
        _PARSER = compile_grammar(parse_grammar(_GRAMMAR_TEXT, env), env)
    return _PARSER


def _tree_from_form(form: Form) -> Leaf | BinOp:
    if isinstance(form, Fraction):
        return Leaf(form)
    op, left, right = form
    return BinOp(op.name, _tree_from_form(left), _tree_from_form(right))


def parse_infix(tokens) -> InfixExpr:
    """Parse a form sequence (numbers, operator symbols, nested lists)."""
    tokens = tuple(tokens)
    outcome = run(_parser(), tokens)
    if not isinstance(outcome, Success) or not outcome.rest.at_end():
        raise InfixSyntaxError("malformed infix expression",
                               position=outcome.rest.position)
    assert len(outcome.values) == 1
    return InfixExpr(tokens=tokens, tree=_tree_from_form(outcome.values[0]))


def eval_tree(tree: Leaf | BinOp) -> Fraction:
    """Exact evaluation of a bare operator tree."""
    if isinstance(tree, Leaf):
        return tree.value
    left = eval_tree(tree.left)
    right = eval_tree(tree.right)
    if tree.op == "+":
        return left + right
    if tree.op == "-":
        return left - right
    if tree.op == "*":
        return left * right
    if right == 0:
        raise DivisionByZeroError(rendered=render(_form_of(tree)))
    return left / right


def _form_of(tree: Leaf | BinOp) -> Form:
    if isinstance(tree, Leaf):
        return tree.value
    return (Symbol(tree.op), _form_of(tree.left), _form_of(tree.right))


def eval_infix(expr: InfixExpr) -> Fraction:
    """Exact evaluation of a parsed infix expression."""
    return eval_tree(expr.tree)


def lex_infix(text: str) -> tuple[Form, ...]:
    """Split infix text into forms: digits are numbers, ``+-*/`` operators,
    parens build nested lists. ``(1/5)`` and ``(1 / 5)`` lex identically."""
    stack: list[list[Form]] = [[]]
    opens: list[int] = []
    pos = 0
    while pos < len(text):
        c = text[pos]
        if c.isspace():
            pos += 1
        elif c.isdigit():
            start = pos
            while pos < len(text) and text[pos].isdigit():
                pos += 1
            stack[-1].append(Fraction(int(text[start:pos])))
        elif c in OPS:
            stack[-1].append(Symbol(c))
            pos += 1
        elif c == "(":
            stack.append([])
            opens.append(pos)
            pos += 1
        elif c == ")":
            if len(stack) == 1:
                raise InfixSyntaxError("unbalanced ')'", position=pos)
            done = tuple(stack.pop())
            opens.pop()
            stack[-1].append(done)
            pos += 1
        else:
            raise InfixSyntaxError(f"unexpected character {c!r}", position=pos)
    if len(stack) > 1:
        raise InfixSyntaxError("unbalanced '('", position=opens[-1])
    return tuple(stack[0])


def calc(text: str) -> Fraction:
    """Lex, parse and evaluate an infix expression in one go."""
    return eval_infix(parse_infix(lex_infix(text)))
