"""
Reader for the canonical text encoding

Grammar (whitespace is ignored):

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("+" | "-") unary | power
    power   := atom ("^" exponent)?
    exponent:= ["-"] integer | "(" ["-"] integer ")"
    atom    := integer | name | ("cosh" | "sinh") "(" "x" ")" | "(" expr ")"

Names must be symbols of the tower. cosh(x) and sinh(x) are rewritten in
the exponential generator eta = exp(x).
"""

import re
from typing import List, NamedTuple, Optional

from utils.exceptions import ExpressionSyntaxError, UnknownSymbolError, UnsupportedTowerError

from .fields import FieldElem, FieldTower, cosh_sinh

FUNCTIONS = ("cosh", "sinh")

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


class Token(NamedTuple):
    kind: str
    text: str
    position: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            break
        number, name, op = match.groups()
        start = match.start(match.lastindex)
        if number is not None:
            tokens.append(Token("int", number, start))
        elif name is not None:
            tokens.append(Token("name", name, start))
        else:
            if op not in "+-*/^()":
                raise ExpressionSyntaxError(f"unexpected character '{op}'", text=text, position=start)
            tokens.append(Token("op", op, start))
        position = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class ExpressionParser:
    """Recursive-descent reader producing canonical FieldElem values"""

    def __init__(self, tower: FieldTower):
        self.tower = tower
        self._tokens: List[Token] = []
        self._index = 0
        self._text = ""

    def parse(self, text: str) -> FieldElem:
        self._text = text
        self._tokens = tokenize(text)
        self._index = 0
        if self._peek().kind == "end":
            raise ExpressionSyntaxError("empty expression", text=text, position=0)
        value = self._expr()
        token = self._peek()
        if token.kind != "end":
            raise self._error(f"unexpected '{token.text}'", token)
        return value

    def _peek(self) -> Token:
        return self._tokens[self._index]

    def _next(self) -> Token:
        token = self._tokens[self._index]
        self._index += 1
        return token

    def _accept(self, op: str) -> Optional[Token]:
        token = self._peek()
        if token.kind == "op" and token.text == op:
            self._index += 1
            return token
        return None

    def _expect(self, op: str) -> Token:
        token = self._accept(op)
        if token is None:
            found = self._peek()
            raise self._error(f"expected '{op}', found '{found.text or 'end of input'}'", found)
        return token

    def _error(self, message: str, token: Token) -> ExpressionSyntaxError:
        return ExpressionSyntaxError(message, text=self._text, position=token.position)

    def _expr(self) -> FieldElem:
        value = self._term()
        while True:
            if self._accept("+"):
                value = value + self._term()
            elif self._accept("-"):
                value = value - self._term()
            else:
                return value

    def _term(self) -> FieldElem:
        value = self._unary()
        while True:
            token = self._peek()
            if self._accept("*"):
                value = value * self._unary()
            elif self._accept("/"):
                divisor = self._unary()
                if divisor.is_zero:
                    raise self._error("division by zero", token)
                value = value / divisor
            else:
                return value

    def _unary(self) -> FieldElem:
        if self._accept("-"):
            return -self._unary()
        if self._accept("+"):
            return self._unary()
        return self._power()

    def _power(self) -> FieldElem:
        base = self._atom()
        token = self._peek()
        if not self._accept("^"):
            return base
        exponent = self._exponent()
        if exponent < 0 and base.is_zero:
            raise self._error("negative power of zero", token)
        return base ** exponent

    def _exponent(self) -> int:
        grouped = self._accept("(") is not None
        negative = self._accept("-") is not None
        token = self._next()
        if token.kind != "int":
            raise self._error("exponent must be an integer", token)
        if grouped:
            self._expect(")")
        value = int(token.text)
        return -value if negative else value

    def _atom(self) -> FieldElem:
        token = self._next()
        if token.kind == "int":
            return self.tower.element(int(token.text))
        if token.kind == "name":
            if token.text in FUNCTIONS:
                return self._function(token)
            if token.text not in self.tower.names:
                raise UnknownSymbolError(f"unknown symbol '{token.text}'", symbol=token.text,
                                         text=self._text, position=token.position)
            return self.tower.symbol(token.text)
        if token.kind == "op" and token.text == "(":
            value = self._expr()
            self._expect(")")
            return value
        raise self._error(f"unexpected '{token.text or 'end of input'}'", token)

    def _function(self, token: Token) -> FieldElem:
        self._expect("(")
        argument = self._next()
        if argument.kind != "name" or argument.text != "x":
            raise self._error(f"{token.text} only takes the argument x", argument)
        self._expect(")")
        try:
            cosh, sinh = cosh_sinh(self.tower)
        except UnsupportedTowerError as exc:
            raise self._error(f"{token.text}(x) needs the exponential tower eta = exp(x)", token) from exc
        return cosh if token.text == "cosh" else sinh


def parse_expression(text: str, tower: FieldTower) -> FieldElem:
    return ExpressionParser(tower).parse(text)
