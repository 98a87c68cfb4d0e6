"""The universal S-expression-shaped data model.

Every layer of the stack trades in *forms*: an atom, or a tuple of forms.
The same representation serves as token (a character is an atom), as AST
(a nested tuple), and as parse capture, which is what lets one combinator
engine run over character streams and token streams alike.

Atoms are:

* ``Char``     -- one Unicode scalar (the token type of character streams)
* ``Symbol``   -- a non-empty name with no whitespace
* ``Text``     -- a string literal
* ``Fraction`` -- numbers are exact rationals (``fractions.Fraction``
  already keeps the denominator positive and the pair in lowest terms)
* ``bool``     -- written ``#t`` / ``#f``

Lists are plain tuples, so structural equality and hashing come for free
and every form is immutable and safe to share between threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import PositionedError

__all__ = [
    "Char", "Symbol", "Text", "Atom", "Form", "ReadError",
    "render", "read", "chars", "char_text", "is_list",
]


@dataclass(frozen=True)
class Char:
    """A single character atom."""

    value: str

    def __post_init__(self):
        if len(self.value) != 1:
            raise ValueError(f"Char needs exactly one character, got {self.value!r}")

    def __repr__(self) -> str:
        return f"Char({self.value!r})"


@dataclass(frozen=True)
class Symbol:
    """A name. Non-empty, no whitespace."""

    name: str

    def __post_init__(self):
        if not self.name or any(c.isspace() for c in self.name):
            raise ValueError(f"invalid symbol name: {self.name!r}")

    def __repr__(self) -> str:
        return f"Symbol({self.name!r})"


@dataclass(frozen=True)
class Text:
    """A string literal atom (distinct from Symbol)."""

    value: str

    def __repr__(self) -> str:
        return f"Text({self.value!r})"


Atom = Char | Symbol | Text | Fraction | bool
# A Form is an atom or a tuple of forms. Finite by construction: tuples
# cannot contain themselves.
Form = Atom | tuple


def is_list(form: Form) -> bool:
    return isinstance(form, tuple)


class ReadError(PositionedError):
    """Raised by read() on malformed textual input."""

    stage = "read"


_NAMED_CHARS = {"space": " ", "newline": "\n", "tab": "\t"}
_CHAR_NAMES = {v: k for k, v in _NAMED_CHARS.items()}
_NUMBER_RE = re.compile(r"[+-]?[0-9]+(/[0-9]+)?\Z")
_TEXT_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t"}
_TEXT_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t"}


def render(form: Form) -> str:
    """Canonical parenthesized rendering; read(render(f)) == f."""
    if isinstance(form, bool):
        return "#t" if form else "#f"
    if isinstance(form, Fraction):
        if form.denominator == 1:
            return str(form.numerator)
        return f"{form.numerator}/{form.denominator}"
    if isinstance(form, Char):
        name = _CHAR_NAMES.get(form.value)
        return f"#\\{name}" if name else f"#\\{form.value}"
    if isinstance(form, Symbol):
        return form.name
    if isinstance(form, Text):
        body = "".join(_TEXT_ESCAPES.get(c, c) for c in form.value)
        return f'"{body}"'
    if isinstance(form, tuple):
        return "(" + " ".join(render(item) for item in form) + ")"
    raise TypeError(f"not a form: {form!r}")


def chars(text: str) -> tuple[Char, ...]:
    """The character-stream view of a string: one Char form per scalar."""
    return tuple(Char(c) for c in text)


def char_text(forms) -> str:
    """Join a sequence of Char forms back into a string."""
    return "".join(f.value for f in forms)


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, pos: int | None = None) -> ReadError:
        return ReadError(message, position=self.pos if pos is None else pos)

    def skip_space(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def read_form(self) -> Form:
        self.skip_space()
        if self.at_end():
            raise self.error("unexpected end of input")
        c = self.text[self.pos]
        if c == "(":
            return self.read_tuple()
        if c == ")":
            raise self.error("unbalanced ')'")
        if c == '"':
            return self.read_text()
        if self.text.startswith("#\\", self.pos):
            return self.read_char()
        return self.read_plain_atom()

    def read_tuple(self) -> tuple:
        open_pos = self.pos
        self.pos += 1
        items = []
        while True:
            self.skip_space()
            if self.at_end():
                raise self.error("unbalanced '('", pos=open_pos)
            if self.text[self.pos] == ")":
                self.pos += 1
                return tuple(items)
            items.append(self.read_form())

    def read_text(self) -> Text:
        open_pos = self.pos
        self.pos += 1
        out = []
        while True:
            if self.at_end():
                raise self.error("unterminated string", pos=open_pos)
            c = self.text[self.pos]
            self.pos += 1
            if c == '"':
                return Text("".join(out))
            if c == "\\":
                if self.at_end():
                    raise self.error("dangling escape", pos=self.pos - 1)
                esc = self.text[self.pos]
                self.pos += 1
                if esc not in _TEXT_UNESCAPES:
                    raise self.error(f"unknown escape '\\{esc}'", pos=self.pos - 2)
                out.append(_TEXT_UNESCAPES[esc])
            else:
                out.append(c)

    def read_char(self) -> Char:
        start = self.pos
        self.pos += 2
        if self.at_end():
            raise self.error("dangling character literal", pos=start)
        c = self.text[self.pos]
        self.pos += 1
        if c.isalpha():
            word = c
            while not self.at_end() and self.text[self.pos].isalpha():
                word += self.text[self.pos]
                self.pos += 1
            if len(word) == 1:
                return Char(word)
            if word in _NAMED_CHARS:
                return Char(_NAMED_CHARS[word])
            raise self.error(f"unknown character name '{word}'", pos=start)
        return Char(c)

    def read_plain_atom(self) -> Form:
        start = self.pos
        while not self.at_end():
            c = self.text[self.pos]
            if c.isspace() or c in '()"':
                break
            self.pos += 1
        token = self.text[start:self.pos]
        if token == "#t":
            return True
        if token == "#f":
            return False
        if _NUMBER_RE.match(token):
            if "/" in token:
                num, den = token.split("/")
                if int(den) == 0:
                    raise self.error("zero denominator", pos=start)
                return Fraction(int(num), int(den))
            return Fraction(int(token))
        if token.startswith("#"):
            raise self.error(f"unknown '#' syntax {token!r}", pos=start)
        return Symbol(token)


def read(text: str) -> Form:
    """Parse a single complete form; inverse of render on its image."""
    reader = _Reader(text)
    form = reader.read_form()
    reader.skip_space()
    if not reader.at_end():
        raise reader.error("trailing input after form")
    return form
