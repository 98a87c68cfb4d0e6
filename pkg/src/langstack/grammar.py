"""A textual grammar notation compiled onto the combinators.

The notation is line-oriented, one rule per ``name := body ;``::

    # a float-shaped number
    num := ('-' / '+')? digit* ('.' digit*)? ;

Body operators, loosest first:

* ``a / b``    choice (left-biased)
* ``a :-> f``  attach the named semantic action f to a
* ``a + b``    sequence (plain juxtaposition ``a b`` also sequences)
* ``a *``      repetition -- ONE or more (deliberately not Kleene-zero)
* ``a ?``      optional (compiles to a choice whose last alternative is epsilon)
* ``@( a )``   descend: match one nested list token by parsing its items
* ``'c'``      a character token literal (escapes: ``\\'`` ``\\\\`` ``\\n`` ``\\t``)
* ``"name"``   a symbol token literal
* ``name``     reference to another rule or to an environment parser
* ``( a )``    grouping

``#`` starts a line comment. The first rule is the start rule unless a
``start name;`` directive says otherwise. Rule and action names resolve
through a ParserEnv; the stock environment provides ``digit``, ``alpha``,
``whitespace``, ``any`` and ``epsilon``.

The notation parser below is written with the same combinators the
compiled grammars run on; its semantic actions build a tagged-form AST
which is then lifted into the node classes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .combinators import (
    Parser, Success, TokenStream, any_token, char_eq, choice, descend, epsilon,
    many0, many1, map_action, run, satisfy, seq, symbol_eq,
)
from .errors import LangstackError, PositionedError
from .forms import Char, Form, Symbol, char_text, chars

__all__ = [
    "RuleRef", "Lit", "SeqNode", "ChoiceNode", "RepeatNode", "OptionalNode",
    "DescendNode", "ActionNode", "Grammar", "ParserEnv",
    "GrammarSyntaxError", "UnresolvedRuleError", "LeftRecursionError",
    "UnknownActionError",
    "parse_grammar", "compile_grammar", "full_match", "line_col",
]


class GrammarSyntaxError(PositionedError):
    stage = "grammar"


class UnresolvedRuleError(LangstackError):
    stage = "grammar"


class LeftRecursionError(LangstackError):
    stage = "grammar"


class UnknownActionError(LangstackError):
    stage = "grammar"


# --- grammar AST ----------------------------------------------------------

@dataclass(frozen=True)
class RuleRef:
    name: str


@dataclass(frozen=True)
class Lit:
    """A literal token: a Char matches a character, a Symbol a symbol."""

    value: Char | Symbol


@dataclass(frozen=True)
class SeqNode:
    parts: tuple


@dataclass(frozen=True)
class ChoiceNode:
    alternatives: tuple


@dataclass(frozen=True)
class RepeatNode:
    body: object


@dataclass(frozen=True)
class OptionalNode:
    body: object


@dataclass(frozen=True)
class DescendNode:
    body: object


@dataclass(frozen=True)
class ActionNode:
    body: object
    action: str


@dataclass(frozen=True)
class Grammar:
    rules: Mapping[str, object]
    start: str


def _builtin_parsers() -> dict[str, Parser]:
    return {
        "digit": satisfy(lambda f: isinstance(f, Char) and f.value.isdigit(), "pdigit"),
        "alpha": satisfy(lambda f: isinstance(f, Char) and f.value.isalpha(), "palpha"),
        "whitespace": satisfy(lambda f: isinstance(f, Char) and f.value.isspace(), "pspace"),
        "any": any_token(),
        "epsilon": epsilon(),
    }


@dataclass(frozen=True)
class ParserEnv:
    """Name resolution for compiled grammars: parsers and named actions."""

    parsers: Mapping[str, Parser] = field(default_factory=dict)
    actions: Mapping[str, Callable[[tuple[Form, ...]], Sequence[Form]]] = field(default_factory=dict)

    @classmethod
    def default(cls, parsers: Mapping[str, Parser] | None = None,
                actions: Mapping[str, Callable] | None = None) -> "ParserEnv":
        """The stock builtins, optionally extended."""
        merged = _builtin_parsers()
        merged.update(parsers or {})
        return cls(parsers=merged, actions=dict(actions or {}))


def line_col(text: str, offset: int) -> tuple[int, int]:
    """1-based (line, column) of a character offset into text."""
    line = text.count("\n", 0, offset) + 1
    last_nl = text.rfind("\n", 0, offset)
    return line, offset - last_nl


# --- the notation parser (built from the combinators it feeds) ------------

_ESCAPES = {"n": "\n", "t": "\t"}


def _drop(p: Parser) -> Parser:
    return map_action(p, lambda vs: (), "drop")


def _literal(text: str) -> Parser:
    return seq(*[char_eq(c) for c in text])


def _tag(name: str):
    sym = Symbol(name)

    def build(vs):
        return ((sym,) + tuple(vs),)
    return build


def _fold_postfix(vs):
    node = vs[0]
    for mark in vs[1:]:
        node = (Symbol("rep" if mark.value == "*" else "opt"), node)
    return (node,)


def _fold_seq(vs):
    if len(vs) == 1:
        return (vs[0],)
    return ((Symbol("seq"),) + tuple(vs),)


def _fold_action(vs):
    if len(vs) == 1:
        return (vs[0],)
    return ((Symbol("act"), vs[1], vs[0]),)


def _fold_choice(vs):
    if len(vs) == 1:
        return (vs[0],)
    return ((Symbol("choice"),) + tuple(vs),)


def _notation_parser() -> Parser:
    is_char = lambda pred, label: satisfy(
        lambda f: isinstance(f, Char) and pred(f.value), label)
    space = is_char(str.isspace, "pspace")
    comment = seq(char_eq("#"),
                  many0(is_char(lambda c: c != "\n", "pnotnl")),
                  choice(char_eq("\n"), epsilon()))
    ws = _drop(many0(choice(space, comment)))

    def tok(text: str) -> Parser:
        return seq(_drop(_literal(text)), ws)

    ident_first = is_char(lambda c: c.isalpha() or c == "_", "pidentfirst")
    ident_rest = is_char(lambda c: c.isalnum() or c == "_", "pidentrest")
    ident = seq(map_action(seq(ident_first, many0(ident_rest)),
                           lambda vs: (Symbol(char_text(vs)),), "ident"),
                ws)

    plain_char = is_char(lambda c: c != "'", "pplain")
    escaped_char = map_action(
        seq(_drop(char_eq("\\")), any_token()),
        lambda vs: (Char(_ESCAPES.get(vs[0].value, vs[0].value)),), "escape")
    charlit = seq(map_action(
        seq(_drop(char_eq("'")), choice(escaped_char, plain_char), _drop(char_eq("'"))),
        _tag("char"), "charlit"), ws)

    symlit = seq(map_action(
        seq(_drop(char_eq('"')),
            map_action(many1(is_char(lambda c: c != '"', "psymchar")),
                       lambda vs: (Symbol(char_text(vs)),), "symname"),
            _drop(char_eq('"'))),
        _tag("sym"), "symlit"), ws)

    body = Parser(lambda s: expr(s), "body")  # forward reference

    group = seq(tok("("), body, tok(")"))
    desc = map_action(seq(_drop(_literal("@(")), ws, body, tok(")")),
                      _tag("desc"), "descend")
    ref = map_action(ident, _tag("ref"), "ref")

    primary = choice(desc, group, charlit, symlit, ref)
    postfix = map_action(
        seq(primary, many0(choice(seq(char_eq("*"), ws), seq(char_eq("?"), ws)))),
        _fold_postfix, "postfix")
    # sequence parts may be joined by '+' or simply juxtaposed
    parts = map_action(seq(postfix, many0(choice(seq(tok("+"), postfix), postfix))),
                       _fold_seq, "seq")
    acted = map_action(seq(parts, choice(seq(tok(":->"), ident), epsilon())),
                       _fold_action, "action")
    expr = map_action(seq(acted, many0(seq(tok("/"), acted))),
                      _fold_choice, "choice")

    rule = map_action(seq(ident, tok(":="), expr, tok(";")), _tag("rule"), "rule")
    start = map_action(seq(_drop(seq(_literal("start"), many1(space))), ws,
                           ident, tok(";")),
                       _tag("start"), "start")
    return seq(ws, many0(choice(rule, start)))


_NOTATION = _notation_parser()


def _node_from_form(form: Form):
    tag = form[0].name
    if tag == "ref":
        return RuleRef(form[1].name)
    if tag == "char" or tag == "sym":
        return Lit(form[1])
    if tag == "seq":
        return SeqNode(tuple(_node_from_form(p) for p in form[1:]))
    if tag == "choice":
        return ChoiceNode(tuple(_node_from_form(p) for p in form[1:]))
    if tag == "rep":
        return RepeatNode(_node_from_form(form[1]))
    if tag == "opt":
        return OptionalNode(_node_from_form(form[1]))
    if tag == "desc":
        return DescendNode(_node_from_form(form[1]))
    if tag == "act":
        return ActionNode(_node_from_form(form[2]), form[1].name)
    raise AssertionError(f"unexpected grammar form tag {tag!r}")


def parse_grammar(text: str, env: ParserEnv | None = None) -> Grammar:
    """Parse and validate the textual notation into a Grammar.

    env supplies the parser names considered resolvable beyond the
    grammar's own rules; by default the stock builtins.
    """
    outcome = run(_NOTATION, chars(text))
    assert isinstance(outcome, Success)  # the file parser never fails outright
    if not outcome.rest.at_end():
        line, col = line_col(text, outcome.rest.position)
        raise GrammarSyntaxError("cannot parse rule", position=outcome.rest.position,
                                 line=line, col=col)

    rules: dict[str, object] = {}
    start: str | None = None
    for item in outcome.values:
        tag = item[0].name
        name = item[1].name
        if tag == "start":
            start = name
            continue
        if name in rules:
            raise GrammarSyntaxError(f"duplicate rule {name!r}")
        rules[name] = _node_from_form(item[2])
    if not rules:
        raise GrammarSyntaxError("grammar has no rules")
    if start is None:
        start = next(iter(rules))
    if start not in rules:
        raise UnresolvedRuleError(f"start rule {start!r} is not defined")

    grammar = Grammar(rules=rules, start=start)
    known = set((env.parsers if env else _builtin_parsers()).keys())
    _check_resolution(grammar, known)
    _check_left_recursion(grammar, known)
    return grammar


def _refs_of(node, acc: set):
    if isinstance(node, RuleRef):
        acc.add(node.name)
    elif isinstance(node, SeqNode):
        for p in node.parts:
            _refs_of(p, acc)
    elif isinstance(node, ChoiceNode):
        for p in node.alternatives:
            _refs_of(p, acc)
    elif isinstance(node, (RepeatNode, OptionalNode, DescendNode, ActionNode)):
        _refs_of(node.body, acc)


def _check_resolution(grammar: Grammar, known: set[str]):
    for rule_name, node in grammar.rules.items():
        refs: set[str] = set()
        _refs_of(node, refs)
        for ref in refs:
            if ref not in grammar.rules and ref not in known:
                raise UnresolvedRuleError(
                    f"rule {rule_name!r} references undefined {ref!r}")


def _check_left_recursion(grammar: Grammar, known: set[str]):
    rules = grammar.rules

    # Fixpoint nullability per rule. Environment parsers are assumed to
    # consume, except the epsilon builtin.
    nullable: dict[str, bool] = {name: False for name in rules}

    def node_nullable(node) -> bool:
        if isinstance(node, RuleRef):
            if node.name in rules:
                return nullable[node.name]
            return node.name == "epsilon"
        if isinstance(node, Lit) or isinstance(node, DescendNode):
            return False
        if isinstance(node, SeqNode):
            return all(node_nullable(p) for p in node.parts)
        if isinstance(node, ChoiceNode):
            return any(node_nullable(p) for p in node.alternatives)
        if isinstance(node, OptionalNode):
            return True
        if isinstance(node, (RepeatNode, ActionNode)):
            return node_nullable(node.body)
        raise AssertionError(node)

    changed = True
    while changed:
        changed = False
        for name, node in rules.items():
            value = node_nullable(node)
            if value and not nullable[name]:
                nullable[name] = True
                changed = True

    # Rules a rule can invoke before consuming any token.
    def first_edges(node, acc: set):
        if isinstance(node, RuleRef):
            if node.name in rules:
                acc.add(node.name)
        elif isinstance(node, SeqNode):
            for part in node.parts:
                first_edges(part, acc)
                if not node_nullable(part):
                    break
        elif isinstance(node, ChoiceNode):
            for alt in node.alternatives:
                first_edges(alt, acc)
        elif isinstance(node, (RepeatNode, OptionalNode, ActionNode)):
            first_edges(node.body, acc)
        # Lit and DescendNode consume before anything recursive runs.

    reachable: set[str] = set()
    frontier = [grammar.start]
    while frontier:
        name = frontier.pop()
        if name in reachable:
            continue
        reachable.add(name)
        refs: set[str] = set()
        _refs_of(rules[name], refs)
        frontier.extend(r for r in refs if r in rules)

    edges = {}
    for name in reachable:
        acc: set[str] = set()
        first_edges(rules[name], acc)
        edges[name] = acc

    WHITE, GRAY, BLACK = 0, 1, 2
    state = {name: WHITE for name in reachable}

    def visit(name: str, trail: list[str]):
        state[name] = GRAY
        trail.append(name)
        for succ in sorted(edges[name]):
            if state[succ] == GRAY:
                cycle = trail[trail.index(succ):] + [succ]
                raise LeftRecursionError(
                    "left-recursive cycle: " + " -> ".join(cycle))
            if state[succ] == WHITE:
                visit(succ, trail)
        trail.pop()
        state[name] = BLACK

    for name in sorted(reachable):
        if state[name] == WHITE:
            visit(name, [])


def compile_grammar(grammar: Grammar, env: ParserEnv | None = None) -> Parser:
    """Lower a validated Grammar to a Parser for its start rule.

    Rule references compile to lazy indirections so mutually recursive
    rules work; the environment is snapshotted, so later mutation of the
    mappings passed in does not affect the compiled parser.
    """
    if env is None:
        env = ParserEnv.default()
    parsers = dict(env.parsers)
    actions = dict(env.actions)
    compiled: dict[str, Parser] = {}

    def lower(node) -> Parser:
        if isinstance(node, RuleRef):
            name = node.name
            if name in grammar.rules:
                return Parser(lambda s: compiled[name](s), name)
            if name in parsers:
                return parsers[name]
            raise UnresolvedRuleError(f"undefined rule {name!r}")
        if isinstance(node, Lit):
            if isinstance(node.value, Char):
                return char_eq(node.value.value)
            return symbol_eq(node.value.name)
        if isinstance(node, SeqNode):
            return seq(*[lower(p) for p in node.parts])
        if isinstance(node, ChoiceNode):
            return choice(*[lower(p) for p in node.alternatives])
        if isinstance(node, RepeatNode):
            return many1(lower(node.body))
        if isinstance(node, OptionalNode):
            return choice(lower(node.body), epsilon())
        if isinstance(node, DescendNode):
            return descend(lower(node.body))
        if isinstance(node, ActionNode):
            if node.action not in actions:
                raise UnknownActionError(f"unknown action {node.action!r}")
            return map_action(lower(node.body), actions[node.action], node.action)
        raise AssertionError(node)

    for name, node in grammar.rules.items():
        compiled[name] = lower(node)
    return compiled[grammar.start]


def full_match(p: Parser, tokens: Sequence[Form] | str) -> bool:
    """True iff p succeeds on tokens and consumes all of them."""
    outcome = run(p, tokens)
    return isinstance(outcome, Success) and outcome.rest.at_end()
