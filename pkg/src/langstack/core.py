"""The minimal core language: a lexically scoped call-by-value evaluator.

Expressions are constants, variable references, two-armed ``if``, lambda,
application, ``letrec`` (the one recursion mechanism), and primitive
arithmetic/comparison on exact rationals. Values are rationals, booleans,
text, and closures. There is no mutation: environments grow by stacking
fresh frames, never by assignment, so evaluation is pure and closures are
safe to share.

The evaluator runs on an explicit work stack rather than host recursion:
call depth is tracked exactly and overflowing the configured limit raises
RecursionDepthError instead of exhausting the interpreter stack. There is
no tail-call optimization; the depth limit is an implementation bound,
not a language semantic.

Core programs serialize as forms::

    (letrec ((fac (lambda (n) (if (> n 0) (* n (fac (- n 1))) 1))))
      (fac 5))

read_core/core_to_form convert between that notation and the expression
classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DivisionByZeroError, LangstackError
from .forms import Form, Symbol, Text, render

__all__ = [
    "Const", "VarRef", "If", "Lambda", "Apply", "LetRec", "PrimCall",
    "CoreExpr", "Closure", "Value", "Env",
    "UnboundVariableError", "ArityError", "TypeMismatchError",
    "RecursionDepthError", "CoreSyntaxError",
    "eval_core", "read_core", "core_to_form", "render_value",
]

PRIM_OPS = ("+", "-", "*", "/", ">", "<", "=", ">=", "<=")


class UnboundVariableError(LangstackError):
    stage = "eval"

    def __init__(self, name: str):
        super().__init__(f"unbound variable {name!r}")
        self.name = name


class ArityError(LangstackError):
    stage = "eval"

    def __init__(self, expected: int, got: int, what: str = "call"):
        super().__init__(f"{what} expected {expected} argument(s), got {got}")
        self.expected = expected
        self.got = got


class TypeMismatchError(LangstackError):
    stage = "eval"


class RecursionDepthError(LangstackError):
    stage = "eval"

    def __init__(self, limit: int):
        super().__init__(f"recursion depth limit of {limit} frames exceeded")
        self.limit = limit


class CoreSyntaxError(LangstackError):
    stage = "parse"


@dataclass(frozen=True)
class Const:
    value: "Fraction | bool | str"


@dataclass(frozen=True)
class VarRef:
    name: str


@dataclass(frozen=True)
class If:
    cond: "CoreExpr"
    then: "CoreExpr"
    orelse: "CoreExpr"


@dataclass(frozen=True)
class Lambda:
    params: tuple[str, ...]
    body: "CoreExpr"

    def __post_init__(self):
        if len(set(self.params)) != len(self.params):
            raise CoreSyntaxError(f"duplicate parameter in {self.params}")


@dataclass(frozen=True)
class Apply:
    fn: "CoreExpr"
    args: tuple


@dataclass(frozen=True)
class LetRec:
    bindings: tuple[tuple[str, Lambda], ...]
    body: "CoreExpr"

    def __post_init__(self):
        names = [name for name, _ in self.bindings]
        if len(set(names)) != len(names):
            raise CoreSyntaxError(f"duplicate letrec binding in {names}")


@dataclass(frozen=True)
class PrimCall:
    op: str
    args: tuple


CoreExpr = Const | VarRef | If | Lambda | Apply | LetRec | PrimCall


class Env:
    """A frame of bindings over an optional parent; lookup walks the chain."""

    __slots__ = ("frame", "parent")

    def __init__(self, parent: "Env | None" = None):
        self.frame: dict[str, Value] = {}
        self.parent = parent

    def lookup(self, name: str) -> "Value":
        env = self
        while env is not None:
            if name in env.frame:
                return env.frame[name]
            env = env.parent
        raise UnboundVariableError(name)


@dataclass
class Closure:
    params: tuple[str, ...]
    body: CoreExpr
    env: Env

    def __repr__(self) -> str:
        return f"<closure ({' '.join(self.params)})>"


Value = Fraction | bool | str | Closure


def render_value(value: Value) -> str:
    if isinstance(value, bool):
        return "#t" if value else "#f"
    if isinstance(value, Fraction):
        return render(value)
    if isinstance(value, str):
        return render(Text(value))
    return repr(value)


def _as_number(value: Value, expr: PrimCall) -> Fraction:
    # bool is not a Fraction, so #t never sneaks into arithmetic
    if isinstance(value, Fraction):
        return value
    raise TypeMismatchError(
        f"{expr.op!r} needs numbers, got {render_value(value)} "
        f"in {render(core_to_form(expr))}")


def _apply_prim(expr: PrimCall, args: list) -> Value:
    if len(args) != 2:
        raise ArityError(2, len(args), what=f"primitive {expr.op!r}")
    a = _as_number(args[0], expr)
    b = _as_number(args[1], expr)
    op = expr.op
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b == 0:
            raise DivisionByZeroError(rendered=render(core_to_form(expr)))
        return a / b
    if op == ">":
        return a > b
    if op == "<":
        return a < b
    if op == "=":
        return a == b
    if op == ">=":
        return a >= b
    if op == "<=":
        return a <= b
    raise AssertionError(op)


def eval_core(expr: CoreExpr, env: Env | None = None, max_depth: int = 10000) -> Value:
    """Evaluate expr in env (empty by default) with a call-depth limit."""
    if env is None:
        env = Env()
    tasks: list[tuple] = [("eval", expr, env)]
    values: list[Value] = []
    depth = 0

    while tasks:
        task = tasks.pop()
        kind = task[0]

        if kind == "eval":
            _, e, here = task
            if isinstance(e, Const):
                values.append(e.value)
            elif isinstance(e, VarRef):
                values.append(here.lookup(e.name))
            elif isinstance(e, Lambda):
                values.append(Closure(e.params, e.body, here))
            elif isinstance(e, If):
                tasks.append(("branch", e, here))
                tasks.append(("eval", e.cond, here))
            elif isinstance(e, Apply):
                tasks.append(("call", e))
                for arg in reversed(e.args):
                    tasks.append(("eval", arg, here))
                tasks.append(("eval", e.fn, here))
            elif isinstance(e, LetRec):
                frame = Env(here)
                for name, lam in e.bindings:
                    frame.frame[name] = Closure(lam.params, lam.body, frame)
                tasks.append(("eval", e.body, frame))
            elif isinstance(e, PrimCall):
                tasks.append(("prim", e))
                for arg in reversed(e.args):
                    tasks.append(("eval", arg, here))
            else:
                raise TypeError(f"not a core expression: {e!r}")

        elif kind == "branch":
            _, e, here = task
            cond = values.pop()
            if not isinstance(cond, bool):
                raise TypeMismatchError(
                    f"if condition must be a boolean, got {render_value(cond)} "
                    f"in {render(core_to_form(e))}")
            tasks.append(("eval", e.then if cond else e.orelse, here))

        elif kind == "call":
            e = task[1]
            n = len(e.args)
            args = values[len(values) - n:]
            del values[len(values) - n:]
            fn = values.pop()
            if not isinstance(fn, Closure):
                raise TypeMismatchError(
                    f"cannot call non-function {render_value(fn)} "
                    f"in {render(core_to_form(e))}")
            if len(fn.params) != n:
                raise ArityError(len(fn.params), n)
            depth += 1
            if depth > max_depth:
                raise RecursionDepthError(max_depth)
            frame = Env(fn.env)
            for name, value in zip(fn.params, args):
                frame.frame[name] = value
            tasks.append(("return",))
            tasks.append(("eval", fn.body, frame))

        elif kind == "return":
            depth -= 1

        else:  # prim
            e = task[1]
            n = len(e.args)
            args = values[len(values) - n:]
            del values[len(values) - n:]
            values.append(_apply_prim(e, args))

    assert len(values) == 1
    return values[0]


# --- the form notation -----------------------------------------------------

def _param_names(form: Form, context: str) -> tuple[str, ...]:
    if not isinstance(form, tuple):
        raise CoreSyntaxError(f"{context}: parameter list must be a list, got {render(form)}")
    names = []
    for item in form:
        if not isinstance(item, Symbol):
            raise CoreSyntaxError(f"{context}: bad parameter {render(item)}")
        names.append(item.name)
    if len(set(names)) != len(names):
        raise CoreSyntaxError(f"{context}: duplicate parameter in ({' '.join(names)})")
    return tuple(names)


def read_core(form: Form) -> CoreExpr:
    """Lift a form into a core expression, validating its shape."""
    if isinstance(form, (Fraction, bool)):
        return Const(form)
    if isinstance(form, Text):
        return Const(form.value)
    if isinstance(form, Symbol):
        return VarRef(form.name)
    if not isinstance(form, tuple):
        raise CoreSyntaxError(f"cannot read {render(form)} as core")
    if not form:
        raise CoreSyntaxError("empty application")

    head = form[0]
    if isinstance(head, Symbol):
        if head.name == "lambda":
            if len(form) != 3:
                raise CoreSyntaxError(f"lambda needs (lambda (params) body): {render(form)}")
            return Lambda(_param_names(form[1], "lambda"), read_core(form[2]))
        if head.name == "if":
            if len(form) != 4:
                raise CoreSyntaxError(f"if needs (if cond then else): {render(form)}")
            return If(read_core(form[1]), read_core(form[2]), read_core(form[3]))
        if head.name == "letrec":
            if len(form) != 3 or not isinstance(form[1], tuple):
                raise CoreSyntaxError(f"letrec needs (letrec (bindings) body): {render(form)}")
            bindings = []
            for binding in form[1]:
                if (not isinstance(binding, tuple) or len(binding) != 2
                        or not isinstance(binding[0], Symbol)):
                    raise CoreSyntaxError(f"bad letrec binding {render(binding)}")
                bound = read_core(binding[1])
                if not isinstance(bound, Lambda):
                    raise CoreSyntaxError(
                        f"letrec binds lambdas only, got {render(binding[1])}")
                bindings.append((binding[0].name, bound))
            names = [n for n, _ in bindings]
            if len(set(names)) != len(names):
                raise CoreSyntaxError(f"duplicate letrec binding in ({' '.join(names)})")
            return LetRec(tuple(bindings), read_core(form[2]))
        if head.name in PRIM_OPS:
            return PrimCall(head.name, tuple(read_core(a) for a in form[1:]))
    return Apply(read_core(head), tuple(read_core(a) for a in form[1:]))


def core_to_form(expr: CoreExpr) -> Form:
    """The inverse of read_core: serialize an expression as a form."""
    if isinstance(expr, Const):
        if isinstance(expr.value, str):
            return Text(expr.value)
        return expr.value
    if isinstance(expr, VarRef):
        return Symbol(expr.name)
    if isinstance(expr, If):
        return (Symbol("if"), core_to_form(expr.cond),
                core_to_form(expr.then), core_to_form(expr.orelse))
    if isinstance(expr, Lambda):
        return (Symbol("lambda"), tuple(Symbol(p) for p in expr.params),
                core_to_form(expr.body))
    if isinstance(expr, Apply):
        return (core_to_form(expr.fn),) + tuple(core_to_form(a) for a in expr.args)
    if isinstance(expr, LetRec):
        bindings = tuple((Symbol(name), core_to_form(lam))
                         for name, lam in expr.bindings)
        return (Symbol("letrec"), bindings, core_to_form(expr.body))
    if isinstance(expr, PrimCall):
        return (Symbol(expr.op),) + tuple(core_to_form(a) for a in expr.args)
    raise TypeError(f"not a core expression: {expr!r}")
