"""langstack: a tower of small languages, each built on the one below.

From the bottom up:

* ``forms``       -- the S-expression-shaped value model everything shares
* ``combinators`` -- parser combinators with an explicit success/failure protocol
* ``grammar``     -- a textual grammar notation compiled onto the combinators
* ``calc``        -- an infix constant calculator defined as one such grammar
* ``core``        -- a minimal lexically scoped evaluator, the compilation target
* ``pasqualish``  -- a Pascal-flavored language: lexed by a grammar, compiled to core
* ``cli``         -- command-line access to each layer
"""

from .forms import Char, Form, ReadError, Symbol, Text, chars, read, render
from .combinators import (
    ActionError, Failure, NonProgressError, ParseOutcome, Parser, Success,
    TokenStream, any_token, char_eq, char_in, choice, descend, digit, epsilon,
    guard, is_success, many0, many1, map_action, parse_num, rest_of,
    result_values, run, satisfy, seq, symbol_eq,
)
from .grammar import (
    Grammar, GrammarSyntaxError, LeftRecursionError, ParserEnv,
    UnknownActionError, UnresolvedRuleError, compile_grammar, full_match,
    parse_grammar,
)
from .calc import InfixExpr, InfixSyntaxError, calc, eval_infix, parse_infix
from .core import (
    ArityError, CoreSyntaxError, Env, RecursionDepthError, TypeMismatchError,
    UnboundVariableError, core_to_form, eval_core, read_core,
)
from .errors import DivisionByZeroError, LangstackError
from .pasqualish import (
    LexError, ParseError, UnknownFunctionError, constant_fold, lex,
    parse_program, run_program,
)

__version__ = "0.1.0"
