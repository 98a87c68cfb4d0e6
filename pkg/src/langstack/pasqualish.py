"""Pasqualish: a small Pascal-flavored expression language.

Programs are one or more function definitions; the body of a function is
a semicolon-separated sequence of expressions whose value is the last
one. There is no assignment and no loop -- recursion does all the work::

    function fac(x)
    begin
      if (x > 0) then
         x*fac(x - 1)
      else 1;
    end

Grammar (parsed by hand below; the lexer is a compiled grammar over the
character stream)::

    program  := funcdef+
    funcdef  := 'function' Ident '(' params? ')' 'begin' exprseq 'end'
    exprseq  := expr (';' expr?)*          -- trailing ';' allowed
    expr     := 'if' '(' expr ')' 'then' expr 'else' expr | cmp
    cmp      := add (('>'|'<'|'=') add)?
    add      := mul (('+'|'-') mul)*       -- left associative
    mul      := atom (('*'|'/') atom)*     -- left associative
    atom     := Num | Ident | Ident '(' args ')' | '(' expr ')'

Unlike the flat calculator in calc.py, arithmetic here has conventional
precedence and LEFT associativity. Number literals are integers; exact
rationals arise through division. ``=`` is numeric comparison.

Compilation targets the core language: the program's functions become one
recursive binding group (mutual recursion works), blocks become nested
single-use bindings, operators become primitive calls. Calls are resolved
against the defined functions, including arity, before anything runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import core
from .calc import BinOp, Leaf, eval_tree
from .combinators import Success, TokenStream
from .errors import LangstackError, PositionedError
from .forms import Symbol, Text, chars
from .grammar import ParserEnv, compile_grammar, line_col, parse_grammar

__all__ = [
    "PToken", "FuncDef", "Program",
    "NumLit", "Var", "Call", "If", "Bin", "Block",
    "LexError", "ParseError", "UnknownFunctionError",
    "lex", "parse_program", "compile_program", "compile_expr", "constant_fold",
    "run_program", "parse_entry",
]

KEYWORDS = frozenset({"function", "begin", "end", "if", "then", "else"})
_PUNCT_KIND = {"(": "lparen", ")": "rparen", ";": "semi", ",": "comma"}


class LexError(PositionedError):
    stage = "lex"


class ParseError(PositionedError):
    stage = "parse"


class UnknownFunctionError(LangstackError):
    stage = "parse"

    def __init__(self, name: str):
        super().__init__(f"call to undefined function {name!r}")
        self.name = name


@dataclass(frozen=True)
class PToken:
    kind: str           # keyword | ident | num | op | lparen | rparen | semi | comma
    text: str
    line: int
    col: int
    value: Fraction | None = None

    def describe(self) -> str:
        return f"{self.kind} {self.text!r}"


# --- lexer: a grammar over the character stream ----------------------------

_LEXER_GRAMMAR = """
token  := ident :-> mk_ident
        / number :-> mk_number
        / op :-> mk_op
        / punct :-> mk_punct ;
ident  := alpha ((alpha / digit / '_')*)? ;
number := digit* ;
op     := '>' / '<' / '=' / '+' / '-' / '*' / '/' ;
punct  := '(' / ')' / ';' / ',' ;
"""


def _joined(vs) -> str:
    return "".join(c.value for c in vs)


def _lexer_actions():
    return {
        "mk_ident": lambda vs: ((Symbol("ident"), Text(_joined(vs))),),
        "mk_number": lambda vs: ((Symbol("num"), Fraction(int(_joined(vs)))),),
        "mk_op": lambda vs: ((Symbol("op"), Text(vs[0].value)),),
        "mk_punct": lambda vs: ((Symbol("punct"), Text(vs[0].value)),),
    }


@lru_cache(maxsize=1)
def _token_parser():
    env = ParserEnv.default(actions=_lexer_actions())
    return compile_grammar(parse_grammar(_LEXER_GRAMMAR, env), env)


def lex(text: str) -> list[PToken]:
    """Tokenize source text; whitespace separates tokens and is dropped."""
    token_parser = _token_parser()
    source = chars(text)
    tokens: list[PToken] = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            return tokens
        outcome = token_parser(TokenStream(source, pos))
        if not isinstance(outcome, Success):
            line, col = line_col(text, pos)
            raise LexError(f"unexpected character {text[pos]!r}",
                           position=pos, line=line, col=col)
        tag, payload = outcome.values[0]
        line, col = line_col(text, pos)
        if tag.name == "ident":
            name = payload.value
            kind = "keyword" if name in KEYWORDS else "ident"
            tokens.append(PToken(kind, name, line, col))
        elif tag.name == "num":
            tokens.append(PToken("num", str(payload), line, col, value=payload))
        elif tag.name == "op":
            tokens.append(PToken("op", payload.value, line, col))
        else:
            tokens.append(PToken(_PUNCT_KIND[payload.value], payload.value, line, col))
        pos = outcome.rest.position


# --- AST --------------------------------------------------------------------

@dataclass(frozen=True)
class NumLit:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


@dataclass(frozen=True)
class If:
    cond: object
    then: object
    orelse: object


@dataclass(frozen=True)
class Bin:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Block:
    exprs: tuple


@dataclass(frozen=True)
class FuncDef:
    name: str
    params: tuple[str, ...]
    body: Block


@dataclass(frozen=True)
class Program:
    functions: tuple[FuncDef, ...]


class _Cursor:
    def __init__(self, tokens: list[PToken]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> PToken | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def advance(self) -> PToken:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, expected: str) -> ParseError:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            where = f"{last.line}:{last.col}" if last else "start"
            return ParseError(f"expected {expected}, found end of input (after {where})",
                              line=last.line if last else 1,
                              col=last.col if last else 1)
        return ParseError(f"expected {expected}, found {tok.describe()}",
                          line=tok.line, col=tok.col)

    def expect(self, kind: str, text: str | None = None) -> PToken:
        tok = self.peek()
        if tok is None or tok.kind != kind or (text is not None and tok.text != text):
            raise self.error(f"{kind}" + (f" {text!r}" if text else ""))
        return self.advance()

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return (tok is not None and tok.kind == kind
                and (text is None or tok.text == text))


def _parse_expr(c: _Cursor):
    if c.at("keyword", "if"):
        c.advance()
        c.expect("lparen")
        cond = _parse_expr(c)
        c.expect("rparen")
        c.expect("keyword", "then")
        then = _parse_expr(c)
        c.expect("keyword", "else")
        orelse = _parse_expr(c)
        return If(cond, then, orelse)
    return _parse_cmp(c)


def _parse_cmp(c: _Cursor):
    left = _parse_add(c)
    if c.at("op") and c.peek().text in (">", "<", "="):
        op = c.advance().text
        return Bin(op, left, _parse_add(c))
    return left


def _parse_add(c: _Cursor):
    left = _parse_mul(c)
    while c.at("op") and c.peek().text in ("+", "-"):
        op = c.advance().text
        left = Bin(op, left, _parse_mul(c))
    return left


def _parse_mul(c: _Cursor):
    left = _parse_atom(c)
    while c.at("op") and c.peek().text in ("*", "/"):
        op = c.advance().text
        left = Bin(op, left, _parse_atom(c))
    return left


def _parse_atom(c: _Cursor):
    if c.at("num"):
        return NumLit(c.advance().value)
    if c.at("ident"):
        name = c.advance().text
        if c.at("lparen"):
            c.advance()
            args = []
            if not c.at("rparen"):
                args.append(_parse_expr(c))
                while c.at("comma"):
                    c.advance()
                    args.append(_parse_expr(c))
            c.expect("rparen")
            return Call(name, tuple(args))
        return Var(name)
    if c.at("lparen"):
        c.advance()
        expr = _parse_expr(c)
        c.expect("rparen")
        return expr
    raise c.error("an expression")


def _starts_expr(c: _Cursor) -> bool:
    return (c.at("num") or c.at("ident") or c.at("lparen")
            or c.at("keyword", "if"))


def _parse_exprseq(c: _Cursor) -> Block:
    exprs = [_parse_expr(c)]
    while c.at("semi"):
        c.advance()
        if _starts_expr(c):
            exprs.append(_parse_expr(c))
        else:
            break
    return Block(tuple(exprs))


def _parse_funcdef(c: _Cursor) -> FuncDef:
    c.expect("keyword", "function")
    name = c.expect("ident").text
    c.expect("lparen")
    params = []
    if c.at("ident"):
        params.append(c.advance().text)
        while c.at("comma"):
            c.advance()
            params.append(c.expect("ident").text)
    c.expect("rparen")
    c.expect("keyword", "begin")
    body = _parse_exprseq(c)
    c.expect("keyword", "end")
    if len(set(params)) != len(params):
        raise ParseError(f"duplicate parameter in function {name!r}")
    return FuncDef(name, tuple(params), body)


def _walk_calls(expr, check):
    if isinstance(expr, Call):
        check(expr)
        for a in expr.args:
            _walk_calls(a, check)
    elif isinstance(expr, If):
        _walk_calls(expr.cond, check)
        _walk_calls(expr.then, check)
        _walk_calls(expr.orelse, check)
    elif isinstance(expr, Bin):
        _walk_calls(expr.left, check)
        _walk_calls(expr.right, check)
    elif isinstance(expr, Block):
        for e in expr.exprs:
            _walk_calls(e, check)


def _arity_table(program: Program) -> dict[str, int]:
    return {f.name: len(f.params) for f in program.functions}


def _resolve_calls(expr, table: dict[str, int]):
    def check(call: Call):
        if call.name not in table:
            raise UnknownFunctionError(call.name)
        expected = table[call.name]
        if len(call.args) != expected:
            err = core.ArityError(expected, len(call.args), what=f"call to {call.name!r}")
            err.stage = "parse"
            raise err
    _walk_calls(expr, check)


def parse_program(tokens: list[PToken]) -> Program:
    """Parse and resolve a token sequence into a Program.

    Resolution rejects calls to undefined functions and wrong argument
    counts before anything is compiled or run.
    """
    c = _Cursor(tokens)
    if not c.at("keyword", "function"):
        raise c.error("'function'")
    functions = []
    while c.peek() is not None:
        functions.append(_parse_funcdef(c))
    program = Program(tuple(functions))
    table: dict[str, int] = {}
    for f in program.functions:
        if f.name in table:
            raise ParseError(f"duplicate function {f.name!r}")
        table[f.name] = len(f.params)
    for f in program.functions:
        _resolve_calls(f.body, table)
    return program


# --- compilation to the core language ---------------------------------------

def compile_expr(expr) -> core.CoreExpr:
    if isinstance(expr, NumLit):
        return core.Const(expr.value)
    if isinstance(expr, Var):
        return core.VarRef(expr.name)
    if isinstance(expr, Call):
        return core.Apply(core.VarRef(expr.name),
                          tuple(compile_expr(a) for a in expr.args))
    if isinstance(expr, If):
        return core.If(compile_expr(expr.cond), compile_expr(expr.then),
                       compile_expr(expr.orelse))
    if isinstance(expr, Bin):
        return core.PrimCall(expr.op, (compile_expr(expr.left),
                                       compile_expr(expr.right)))
    if isinstance(expr, Block):
        # value of the last expression; earlier ones bind a throwaway name
        # (user identifiers cannot start with '_', so it cannot shadow)
        result = compile_expr(expr.exprs[-1])
        for e in reversed(expr.exprs[:-1]):
            result = core.Apply(core.Lambda(("_",), result), (compile_expr(e),))
        return result
    raise TypeError(f"not a pasqualish expression: {expr!r}")


def compile_program(program: Program):
    """Lower a resolved program to a linker: CoreExpr entry -> CoreExpr.

    All functions go into one recursive binding group, so they can call
    each other freely; the entry expression becomes the body.
    """
    bindings = tuple(
        (f.name, core.Lambda(f.params, compile_expr(f.body)))
        for f in program.functions)

    def link(entry: core.CoreExpr) -> core.CoreExpr:
        return core.LetRec(bindings, entry)
    return link


# --- constant folding --------------------------------------------------------

def constant_fold(program: Program) -> Program:
    """Replace every all-constant arithmetic subtree by its value.

    Constant division by zero therefore surfaces at fold time.
    """
    def fold(expr):
        if isinstance(expr, Bin):
            left = fold(expr.left)
            right = fold(expr.right)
            if (expr.op in ("+", "-", "*", "/")
                    and isinstance(left, NumLit) and isinstance(right, NumLit)):
                value = eval_tree(BinOp(expr.op, Leaf(left.value), Leaf(right.value)))
                return NumLit(value)
            return Bin(expr.op, left, right)
        if isinstance(expr, If):
            return If(fold(expr.cond), fold(expr.then), fold(expr.orelse))
        if isinstance(expr, Call):
            return Call(expr.name, tuple(fold(a) for a in expr.args))
        if isinstance(expr, Block):
            return Block(tuple(fold(e) for e in expr.exprs))
        return expr

    return Program(tuple(
        FuncDef(f.name, f.params, fold(f.body)) for f in program.functions))


# --- running ------------------------------------------------------------------

def parse_entry(entry: str, program: Program) -> Call:
    """Parse an entry call like "fac(5)" and resolve it against program."""
    c = _Cursor(lex(entry))
    expr = _parse_expr(c)
    if c.peek() is not None:
        raise c.error("end of entry call")
    if not isinstance(expr, Call):
        raise ParseError(f"entry must be a single call, got {entry!r}")
    _resolve_calls(expr, _arity_table(program))
    return expr


def run_program(text: str, entry: str, fold: bool = False,
                max_depth: int = 10000) -> core.Value:
    """Lex, parse, compile and evaluate: the whole pipeline."""
    program = parse_program(lex(text))
    entry_call = parse_entry(entry, program)
    if fold:
        program = constant_fold(program)
    linked = compile_program(program)(compile_expr(entry_call))
    return core.eval_core(linked, max_depth=max_depth)
