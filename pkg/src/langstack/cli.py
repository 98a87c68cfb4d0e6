"""Command-line front end for the language stack.

Subcommands::

    langstack run FILE --call "fac(5)" [--fold] [--trace] [--decimal]
    langstack calc "5 + ((10 / 2)-(1 / 5))" [--decimal]
    langstack parse --grammar FILE --input TEXT
    langstack grammar-check FILE

Exit codes: 0 success (including REJECT from `parse`: the query worked),
1 lex/parse/grammar errors, 2 runtime evaluation errors, 3 usage errors.
The value goes to stdout as exactly one line; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import pasqualish
from .calc import InfixSyntaxError, calc
from .combinators import Success, run
from .core import (
    ArityError, CoreSyntaxError, RecursionDepthError, TypeMismatchError,
    UnboundVariableError, core_to_form, eval_core, render_value,
)
from .errors import DivisionByZeroError, LangstackError
from .forms import ReadError, render
from .grammar import (
    GrammarSyntaxError, LeftRecursionError, UnknownActionError,
    UnresolvedRuleError, compile_grammar, parse_grammar,
)

EXIT_OK = 0
EXIT_SOURCE = 1
EXIT_RUNTIME = 2
EXIT_USAGE = 3

_SOURCE_ERRORS = (ReadError, InfixSyntaxError, GrammarSyntaxError,
                  UnresolvedRuleError, LeftRecursionError, UnknownActionError,
                  CoreSyntaxError, pasqualish.LexError, pasqualish.ParseError,
                  pasqualish.UnknownFunctionError)
_RUNTIME_ERRORS = (DivisionByZeroError, UnboundVariableError, TypeMismatchError,
                   RecursionDepthError, ArityError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def decimal_str(value: Fraction) -> str:
    """Exact decimal rendering when the expansion terminates, else a/b."""
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return render(value)  # the expansion would not terminate
    places = max(twos, fives)
    if places == 0:
        return str(value.numerator)
    scaled = abs(value.numerator) * 2 ** (places - twos) * 5 ** (places - fives)
    digits = str(scaled).rjust(places + 1, "0")
    sign = "-" if value.numerator < 0 else ""
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def _print_value(value, decimal: bool):
    if decimal and isinstance(value, Fraction):
        print(decimal_str(value))
    else:
        print(render_value(value))


def _read_file(path: str) -> str:
    return open(path, encoding="utf-8").read()


def _cmd_run(args) -> int:
    text = _read_file(args.file)
    try:
        program = pasqualish.parse_program(pasqualish.lex(text))
        entry = pasqualish.parse_entry(args.call, program)
    except _SOURCE_ERRORS + (ArityError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOURCE
    try:
        if args.fold:
            program = pasqualish.constant_fold(program)
        linked = pasqualish.compile_program(program)(
            pasqualish.compile_expr(entry))
        if args.trace:
            print(f"trace: core {render(core_to_form(linked))}", file=sys.stderr)
        value = eval_core(linked)
    except _RUNTIME_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    _print_value(value, args.decimal)
    return EXIT_OK


def _cmd_calc(args) -> int:
    try:
        value = calc(args.expr)
    except InfixSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOURCE
    except DivisionByZeroError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    _print_value(value, args.decimal)
    return EXIT_OK


def _cmd_parse(args) -> int:
    grammar_text = _read_file(args.grammar)
    try:
        parser = compile_grammar(parse_grammar(grammar_text))
    except _SOURCE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOURCE
    outcome = run(parser, args.input)
    if isinstance(outcome, Success) and outcome.rest.at_end():
        captured = " ".join(render(v) for v in outcome.values)
        print(f"ACCEPT ({captured})")
    else:
        print("REJECT")
    return EXIT_OK


def _cmd_grammar_check(args) -> int:
    try:
        grammar = parse_grammar(_read_file(args.file))
    except _SOURCE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOURCE
    print(f"OK ({len(grammar.rules)} rule(s), start {grammar.start!r})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="langstack", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a .pasq program")
    p_run.add_argument("file")
    p_run.add_argument("--call", required=True, help='entry call, e.g. "fac(5)"')
    p_run.add_argument("--fold", action="store_true", help="constant-fold first")
    p_run.add_argument("--trace", action="store_true", help="print stage output to stderr")
    p_run.add_argument("--decimal", action="store_true")
    p_run.set_defaults(fn=_cmd_run)

    p_calc = sub.add_parser("calc", help="evaluate an infix expression")
    p_calc.add_argument("expr")
    p_calc.add_argument("--decimal", action="store_true")
    p_calc.set_defaults(fn=_cmd_calc)

    p_parse = sub.add_parser("parse", help="match input text against a grammar")
    p_parse.add_argument("--grammar", required=True)
    p_parse.add_argument("--input", required=True)
    p_parse.set_defaults(fn=_cmd_parse)

    p_check = sub.add_parser("grammar-check", help="validate a grammar file")
    p_check.add_argument("file")
    p_check.set_defaults(fn=_cmd_grammar_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.fn(args)
    except OSError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LangstackError as exc:
        # anything not already classified is a source problem
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOURCE


if __name__ == "__main__":
    sys.exit(main())
