"""Parser combinators over streams of forms.

A parser is a pure function from a TokenStream to a ParseOutcome:

* ``Success(values, rest)`` -- the captured forms plus the unconsumed
  remainder of the stream;
* ``Failure(reasons, rest)`` -- a chain of reason labels, outermost first,
  with ``rest`` positionally identical to the stream the failing parser
  received. Failure never consumes input.

Failure is a value, not an exception, so alternatives can be tried cheaply.
The combinators build recursive-descent recognizers: sequencing (`seq`)
folds right over a binary sequence step, choice (`choice`) is left-biased
and commits to the first success, and repetition (`many1`) is greedy with
no backtracking across committed iterations. The resulting parsers are
predictive, LL(1)-flavored: once a branch consumes input there is no
global reconsideration.

Primitives consume exactly one token. On an exhausted stream every
consuming parser fails with the reason ``"EMPTY"`` (an implicit `guard`);
on a mismatch it fails with a single label naming the primitive, e.g.
``"pdigit"``. The sequence step contributes ``"p+"`` per nesting level and
repetition contributes ``"pMANY"``, so a failure's reason chain reads like
the path that led to it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import LangstackError
from .forms import Char, Form, Symbol, Text, chars, render

__all__ = [
    "TokenStream", "Success", "Failure", "ParseOutcome", "Parser",
    "NonProgressError", "ActionError",
    "is_success", "result_values", "rest_of",
    "guard", "epsilon", "satisfy",
    "char_eq", "char_in", "digit", "symbol_eq", "any_token",
    "seq", "choice", "many1", "many0", "map_action", "descend",
    "run", "parse_num",
]


@dataclass(frozen=True)
class TokenStream:
    """An immutable cursor over a tuple of forms."""

    source: tuple[Form, ...]
    position: int = 0

    def at_end(self) -> bool:
        return self.position >= len(self.source)

    def peek(self) -> Form:
        return self.source[self.position]

    def advance(self) -> "TokenStream":
        return TokenStream(self.source, self.position + 1)

    def remaining(self) -> tuple[Form, ...]:
        return self.source[self.position:]

    def __repr__(self) -> str:
        ahead = " ".join(render(f) for f in self.remaining())
        return f"<stream @{self.position} {ahead!r}>"


@dataclass(frozen=True)
class Success:
    values: tuple[Form, ...]
    rest: TokenStream


@dataclass(frozen=True)
class Failure:
    reasons: tuple[str, ...]
    rest: TokenStream


ParseOutcome = Success | Failure


class NonProgressError(LangstackError):
    """A repetition body succeeded without consuming input."""


class ActionError(LangstackError):
    """A semantic action raised; carries the captures it was given."""

    def __init__(self, action_name: str, captures: tuple[Form, ...], cause: Exception):
        super().__init__(f"action {action_name!r} failed on {captures!r}: {cause}")
        self.captures = captures
        self.cause = cause


class Parser:
    """A named, pure function TokenStream -> ParseOutcome."""

    __slots__ = ("fn", "name")

    def __init__(self, fn: Callable[[TokenStream], ParseOutcome], name: str = "parser"):
        self.fn = fn
        self.name = name

    def __call__(self, stream: TokenStream) -> ParseOutcome:
        return self.fn(stream)

    def __repr__(self) -> str:
        return f"<parser {self.name}>"


def is_success(outcome: ParseOutcome) -> bool:
    return isinstance(outcome, Success)


def result_values(outcome: ParseOutcome) -> tuple[Form, ...]:
    """Captured forms of a Success; on Failure, the reason labels as Text."""
    if isinstance(outcome, Success):
        return outcome.values
    return tuple(Text(reason) for reason in outcome.reasons)


def rest_of(outcome: ParseOutcome) -> TokenStream:
    return outcome.rest


def guard(p: Parser) -> Parser:
    """Fail with "EMPTY" on an exhausted stream instead of invoking p."""
    def run_guard(stream: TokenStream) -> ParseOutcome:
        if stream.at_end():
            return Failure(("EMPTY",), stream)
        return p(stream)
    return Parser(run_guard, f"guard({p.name})")


def epsilon() -> Parser:
    """Always succeed, consume nothing, capture nothing."""
    def run_epsilon(stream: TokenStream) -> ParseOutcome:
        return Success((), stream)
    return Parser(run_epsilon, "epsilon")


def satisfy(pred: Callable[[Form], bool], label: str) -> Parser:
    """Consume one token matching pred; the base of every primitive."""
    def run_satisfy(stream: TokenStream) -> ParseOutcome:
        if stream.at_end():
            return Failure(("EMPTY",), stream)
        token = stream.peek()
        if pred(token):
            return Success((token,), stream.advance())
        return Failure((label,), stream)
    return Parser(run_satisfy, label)


def char_eq(c: str) -> Parser:
    """Match exactly the character c."""
    return satisfy(lambda f: isinstance(f, Char) and f.value == c, "pchar")


def char_in(charset: Iterable[str]) -> Parser:
    """Match any one character drawn from charset."""
    allowed = frozenset(charset)
    return satisfy(lambda f: isinstance(f, Char) and f.value in allowed, "pcharset")


def digit() -> Parser:
    """Match one decimal digit character."""
    return satisfy(lambda f: isinstance(f, Char) and f.value.isdigit(), "pdigit")


def symbol_eq(name: str) -> Parser:
    """Match the symbol with exactly this name."""
    return satisfy(lambda f: isinstance(f, Symbol) and f.name == name, "psym")


def any_token() -> Parser:
    """Consume any single token."""
    return satisfy(lambda f: True, "pany")


def _seq2(p1: Parser, p2: Parser) -> Parser:
    # The binary sequence step: p1's failure passes through untouched,
    # p2's failure is wrapped with "p+" and the original input restored.
    def run_seq(stream: TokenStream) -> ParseOutcome:
        r1 = p1(stream)
        if not isinstance(r1, Success):
            return r1
        r2 = p2(r1.rest)
        if not isinstance(r2, Success):
            return Failure(("p+",) + r2.reasons, stream)
        return Success(r1.values + r2.values, r2.rest)
    return Parser(run_seq, f"({p1.name} {p2.name})")


def seq(*parsers: Parser) -> Parser:
    """Match parsers in order; captures are concatenated.

    Folds right into nested binary steps, so seq(a, b, c) behaves as
    a followed by (b followed by c). seq(p) is p itself.
    """
    if not parsers:
        raise ValueError("seq needs at least one parser")
    result = parsers[-1]
    for p in reversed(parsers[:-1]):
        result = _seq2(p, result)
    return result


def _choice2(p1: Parser, p2: Parser) -> Parser:
    def run_choice(stream: TokenStream) -> ParseOutcome:
        r1 = p1(stream)
        if isinstance(r1, Success):
            return r1
        return p2(stream)
    return Parser(run_choice, f"({p1.name} | {p2.name})")


def choice(*parsers: Parser) -> Parser:
    """Try alternatives left to right on the same input; first success wins.

    If every alternative fails, the outcome is the last alternative's
    failure. choice(p) is p itself.
    """
    if not parsers:
        raise ValueError("choice needs at least one parser")
    result = parsers[-1]
    for p in reversed(parsers[:-1]):
        result = _choice2(p, result)
    return result


def many1(p: Parser) -> Parser:
    """Greedily match p one or more times; captures are concatenated.

    The first failed iteration stops the loop; if the very first attempt
    fails, the whole repetition fails with reason "pMANY" prepended and
    the input restored. p must consume on success (NonProgressError
    otherwise, since the loop would never terminate).
    """
    def run_many(stream: TokenStream) -> ParseOutcome:
        first = p(stream)
        if not isinstance(first, Success):
            return Failure(("pMANY",) + first.reasons, stream)
        if first.rest.position == stream.position:
            raise NonProgressError(
                f"repetition body {p.name!r} succeeded without consuming input")
        values = first.values
        current = first.rest
        while True:
            step = p(current)
            if not isinstance(step, Success):
                return Success(values, current)
            if step.rest.position == current.position:
                raise NonProgressError(
                    f"repetition body {p.name!r} succeeded without consuming input")
            values = values + step.values
            current = step.rest
    return Parser(run_many, f"many1({p.name})")


def many0(p: Parser) -> Parser:
    """Zero or more occurrences of p; never fails."""
    return choice(many1(p), epsilon())


def map_action(p: Parser, action: Callable[[tuple[Form, ...]], Sequence[Form]],
               name: str = "action") -> Parser:
    """Rewrite p's captures through action; failures pass through."""
    def run_action(stream: TokenStream) -> ParseOutcome:
        outcome = p(stream)
        if not isinstance(outcome, Success):
            return outcome
        try:
            rewritten = tuple(action(outcome.values))
        except LangstackError:
            raise
        except Exception as exc:
            raise ActionError(name, outcome.values, exc) from exc
        return Success(rewritten, outcome.rest)
    return Parser(run_action, f"{p.name}:->{name}")


def descend(p: Parser) -> Parser:
    """Match one list form by running p over its items, to exhaustion.

    Succeeds only if the next token is a list and p both succeeds on the
    sublist and consumes all of it; the captures are p's captures and one
    token of the outer stream is consumed.
    """
    def run_descend(stream: TokenStream) -> ParseOutcome:
        if stream.at_end():
            return Failure(("EMPTY",), stream)
        token = stream.peek()
        if not isinstance(token, tuple):
            return Failure(("plist",), stream)
        inner = p(TokenStream(token))
        if not isinstance(inner, Success):
            return Failure(("plist",) + inner.reasons, stream)
        if not inner.rest.at_end():
            return Failure(("plist", "unconsumed"), stream)
        return Success(inner.values, stream.advance())
    return Parser(run_descend, f"descend({p.name})")


def run(p: Parser, tokens: Sequence[Form] | str) -> ParseOutcome:
    """Apply p to a fresh stream over tokens (a str means its characters)."""
    if isinstance(tokens, str):
        tokens = chars(tokens)
    return p(TokenStream(tuple(tokens)))


def parse_num() -> Parser:
    """The floating-point-shaped number recognizer, combinator by combinator.

    Optional sign, one or more digits, then an optional dot-and-digits
    fraction; the optional pieces fall through to epsilon.
    """
    return seq(
        choice(char_in("-+"), epsilon()),
        many1(digit()),
        choice(seq(char_eq("."), many1(digit())), epsilon()),
    )
