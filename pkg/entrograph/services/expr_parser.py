"""Pratt parser for sequence expressions in the variable n.

Grammar: numbers, `n`, `+ - * / ^` (`^` binds tightest and is right
associative), unary minus, parentheses, and calls `ln(x)`, `exp(x)`,
`min(a, b, ...)`, `max(a, b, ...)`. Evaluation is vectorized over n = 1..N.
"""
import re
from typing import Any, Callable, Dict, Iterator, List, NamedTuple, Optional, Tuple

import numpy as np

from entrograph.core.config import settings
from entrograph.core.errors import ExpressionError, InvalidInputError
from entrograph.schemas.growth import GrowthSeries

NUMBER_RE = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
NAME_RE = re.compile(r"[A-Za-z_]\w*")
OPERATORS = "+-*/^(),"

FUNCTIONS: Dict[str, Tuple[Callable[..., np.ndarray], int]] = {
    "ln": (np.log, 1),
    "exp": (np.exp, 1),
    "min": (np.minimum.reduce, 2),
    "max": (np.maximum.reduce, 2),
}


class Token(NamedTuple):
    type: str
    value: Any
    where: Tuple[int, int]


def tokenize(source: str) -> Iterator[Token]:
    pos = 0
    while pos < len(source):
        char = source[pos]
        if char.isspace():
            pos += 1
            continue
        number = NUMBER_RE.match(source, pos)
        if number:
            yield Token("number", float(number.group(0)), (pos, number.end()))
            pos = number.end()
            continue
        name = NAME_RE.match(source, pos)
        if name:
            yield Token("name", name.group(0), (pos, name.end()))
            pos = name.end()
            continue
        if char in OPERATORS:
            yield Token(char, char, (pos, pos + 1))
            pos += 1
            continue
        raise ExpressionError(source, (pos, pos + 1), f"unexpected character '{char}'")


class Symbol:
    id = ""
    lbp = 0

    def __init__(self, parser: "Parser", token: Token):
        self.parser = parser
        self.token = token
        self.first: Optional["Symbol"] = None
        self.second: Optional["Symbol"] = None
        self.args: List["Symbol"] = []

    def nud(self) -> "Symbol":
        raise self.parser.error(self.token, f"unexpected '{self.token.value or 'end of input'}'")

    def led(self, left: "Symbol") -> "Symbol":
        raise self.parser.error(self.token, f"unexpected '{self.token.value}'")

    def eval(self, n: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def log_eval(self, n: np.ndarray) -> np.ndarray:
        """Natural log of the value; NaN where the value is negative."""
        raise NotImplementedError


class Number(Symbol):
    def nud(self) -> Symbol:
        return self

    def eval(self, n: np.ndarray) -> np.ndarray:
        return np.full_like(n, self.token.value)

    def log_eval(self, n: np.ndarray) -> np.ndarray:
        return np.full_like(n, np.log(self.token.value))


class Name(Symbol):
    def nud(self) -> Symbol:
        name = self.token.value
        if name == "n":
            return self
        if name not in FUNCTIONS:
            raise self.parser.error(self.token, f"unknown name '{name}'")

        self.parser.advance("(")
        self.args.append(self.parser.expression(0))
        while self.parser.token.id == ",":
            self.parser.advance(",")
            self.args.append(self.parser.expression(0))
        self.parser.advance(")")

        arity = FUNCTIONS[name][1]
        if (arity == 1 and len(self.args) != 1) or len(self.args) < arity:
            raise self.parser.error(self.token, f"'{name}' takes {'1' if arity == 1 else 'at least 2'} argument(s)")
        return self

    def eval(self, n: np.ndarray) -> np.ndarray:
        if self.token.value == "n":
            return n
        func, arity = FUNCTIONS[self.token.value]
        values = [arg.eval(n) for arg in self.args]
        return func(values[0]) if arity == 1 else func(values)

    def log_eval(self, n: np.ndarray) -> np.ndarray:
        name = self.token.value
        if name == "n":
            return np.log(n)
        if name == "exp":
            return self.args[0].eval(n)
        if name == "ln":
            return np.log(self.args[0].log_eval(n))
        logs = [arg.log_eval(n) for arg in self.args]
        return np.minimum.reduce(logs) if name == "min" else np.maximum.reduce(logs)


class Infix(Symbol):
    right_assoc = False

    def led(self, left: Symbol) -> Symbol:
        self.first = left
        self.second = self.parser.expression(self.lbp - int(self.right_assoc))
        return self

    def nud(self) -> Symbol:
        if self.id in "+-":
            self.first = self.parser.expression(PREFIX_BP)
            return self
        return super().nud()

    def eval(self, n: np.ndarray) -> np.ndarray:
        if self.second is None:
            value = self.first.eval(n)
            return -value if self.id == "-" else value
        left, right = self.first.eval(n), self.second.eval(n)
        if self.id == "+":
            return left + right
        if self.id == "-":
            return left - right
        if self.id == "*":
            return left * right
        if self.id == "/":
            return left / right
        return np.power(left, right)

    def log_eval(self, n: np.ndarray) -> np.ndarray:
        if self.second is None:
            return self.first.log_eval(n) if self.id == "+" else np.full_like(n, np.nan)
        if self.id == "^":
            return self.second.eval(n) * self.first.log_eval(n)
        left, right = self.first.log_eval(n), self.second.log_eval(n)
        if self.id == "+":
            return np.logaddexp(left, right)
        if self.id == "-":
            return left + np.log1p(-np.exp(right - left))
        if self.id == "*":
            return left + right
        return left - right


class Paren(Symbol):
    def nud(self) -> Symbol:
        inner = self.parser.expression(0)
        self.parser.advance(")")
        return inner


PREFIX_BP = 30


class Parser:
    def __init__(self) -> None:
        self.source = ""
        self.symbol_table: Dict[str, type] = {}
        self.tokens: Iterator[Token] = iter([])
        self.token: Symbol = None  # type: ignore[assignment]
        self.define("end")
        self.define(")")
        self.define(",")
        self.define("number", symbol_class=Number)
        self.define("name", symbol_class=Name)
        self.define("(", symbol_class=Paren)
        for op, lbp in (("+", 10), ("-", 10), ("*", 20), ("/", 20)):
            self.define(op, lbp, Infix)
        self.define("^", 40, Infix, right_assoc=True)

    def define(self, sid: str, lbp: int = 0, symbol_class: type = Symbol, **attrs: Any) -> None:
        self.symbol_table[sid] = type(symbol_class.__name__, (symbol_class,), {"id": sid, "lbp": lbp, **attrs})

    def error(self, token: Token, message: str) -> ExpressionError:
        return ExpressionError(self.source, token.where, message)

    def advance(self, expected: Optional[str] = None) -> Symbol:
        if expected and self.token.id != expected:
            raise self.error(self.token.token, f"expected '{expected}'")
        try:
            token = next(self.tokens)
        except StopIteration:
            end = len(self.source)
            token = Token("end", "", (end, end + 1))
        self.token = self.symbol_table[token.type](self, token)
        return self.token

    def expression(self, rbp: int) -> Symbol:
        current = self.token
        self.advance()
        left = current.nud()
        while rbp < self.token.lbp:
            current = self.token
            self.advance()
            left = current.led(left)
        return left

    def parse(self, source: str) -> Symbol:
        self.source = source
        self.tokens = tokenize(source)
        self.advance()
        tree = self.expression(0)
        if self.token.id != "end":
            raise self.error(self.token.token, f"unexpected '{self.token.token.value}'")
        return tree


def evaluate(source: str, horizon: int, log_space: bool = False) -> np.ndarray:
    """Values (or their natural logs) of `source` at n = 1..horizon."""
    if horizon < 1:
        raise InvalidInputError(f"horizon must be >= 1, got {horizon}")
    tree = Parser().parse(source)
    n = np.arange(1, horizon + 1, dtype=float)
    with np.errstate(all="ignore"):
        values = np.asarray(tree.log_eval(n) if log_space else tree.eval(n), dtype=float)
    return np.broadcast_to(values, n.shape).copy()


def parse_sequence(source: str, horizon: int, clamp_monotone: Optional[bool] = None) -> GrowthSeries:
    """Evaluate `source` at n = 1..horizon and check it is a growth series.

    Sequences that overflow a float are evaluated again in log space.
    """
    if clamp_monotone is None:
        clamp_monotone = settings.clamp_monotone
    values = evaluate(source, horizon)
    log_space = bool(np.isposinf(values).any())
    if log_space:
        values = evaluate(source, horizon, log_space=True)
        infinite = np.flatnonzero(np.isposinf(values))
        if infinite.size:
            raise InvalidInputError(f"'{source}' is infinite at n={infinite[0] + 1}")

    undefined = np.flatnonzero(np.isnan(values))
    if undefined.size:
        reason = "negative or undefined" if log_space else "undefined"
        raise InvalidInputError(f"'{source}' is {reason} at n={undefined[0] + 1}")
    negative = np.flatnonzero(values < 0) if not log_space else np.array([], dtype=np.int64)
    if negative.size:
        n = negative[0] + 1
        raise InvalidInputError(f"'{source}' has negative value {values[n - 1]:g} at n={n}")

    drops = np.flatnonzero(np.diff(values) < 0)
    if drops.size:
        if not clamp_monotone:
            raise InvalidInputError(f"'{source}' decreases at n={drops[0] + 2}")
        values = np.maximum.accumulate(values)
    if log_space:
        return GrowthSeries.from_log_values(values.tolist(), label=source)
    return GrowthSeries.from_values(values.tolist(), label=source)
