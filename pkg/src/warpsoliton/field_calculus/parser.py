"""Text form of expressions.

Grammar (EBNF)::

    expr     = term , { ("+" | "-") , term } ;
    term     = unary , { ("*" | "/") , unary } ;
    unary    = ("-" | "+") , unary | power ;
    power    = atom , [ "^" , unary ] ;          (* right associative *)
    atom     = number | variable | func , "(" , expr , ")" | "(" , expr , ")" ;
    variable = "x" , digit , { digit } ;          (* x1 .. xn *)
    func     = "exp" | "log" | "sinh" | "cosh" | "tanh" | "coth" | "sqrt" ;
    number   = digits , [ "." , [ digits ] ] , [ exponent ]
             | "." , digits , [ exponent ] ;
    exponent = ("e" | "E") , [ "+" | "-" ] , digits ;

The exponent of ``^`` must reduce to a constant.  Whitespace is ignored.
``-x1^2`` parses as ``-(x1^2)``.
"""

from __future__ import annotations

import re

from . import expr as E

_FUNCS = {
    "exp": E.exp, "log": E.log, "sinh": E.sinh, "cosh": E.cosh,
    "tanh": E.tanh, "coth": E.coth, "sqrt": E.sqrt,
}

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)


class ExprSyntaxError(ValueError):
    """Raised for malformed expression text.

    ``offset`` is the byte offset (UTF-8) of the offending token.
    """

    def __init__(self, message, text, char_index):
        self.text = text
        self.offset = len(text[:char_index].encode("utf-8"))
        super().__init__(f"{message} at byte {self.offset}")


class _Parser:
    def __init__(self, text, n):
        self.text = text
        self.n = n
        self.tokens = self._tokenize(text)
        self.i = 0

    def _tokenize(self, text):
        out = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                raise ExprSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
            kind = m.lastgroup
            start = m.start(kind)
            out.append((kind, m.group(kind), start))
            pos = m.end()
        out.append(("end", "", len(text)))
        return out

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.take()
        if kind != "op" or text != value:
            shown = text or "end of input"
            raise ExprSyntaxError(f"expected {value!r}, found {shown!r}", self.text, pos)

    def parse(self):
        e = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {text!r}", self.text, pos)
        return e

    def expr(self):
        e = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.take()
                rhs = self.term()
                e = E.add(e, rhs) if text == "+" else E.sub(e, rhs)
            else:
                return e

    def term(self):
        e = self.unary()
        while True:
            kind, text, pos = self.peek()
            if kind == "op" and text in "*/":
                self.take()
                rhs = self.unary()
                if text == "*":
                    e = E.mul(e, rhs)
                else:
                    try:
                        e = E.div(e, rhs)
                    except ZeroDivisionError:
                        raise ExprSyntaxError("division by zero constant", self.text, pos) from None
            else:
                return e

    def unary(self):
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return E.neg(self.unary())
        if kind == "op" and text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        kind, text, pos = self.peek()
        if kind == "op" and text == "^":
            self.take()
            exponent = self.unary()
            if not exponent.is_const:
                raise ExprSyntaxError("exponent must be a constant", self.text, pos)
            return E.power(base, exponent.value)
        return base

    def atom(self):
        kind, text, pos = self.take()
        if kind == "num":
            return E.const(float(text))
        if kind == "name":
            if text in _FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return _FUNCS[text](arg)
            m = re.fullmatch(r"x([1-9]\d*)", text)
            if m is None:
                raise ExprSyntaxError(f"unknown identifier {text!r}", self.text, pos)
            axis = int(m.group(1)) - 1
            if axis >= self.n:
                raise ExprSyntaxError(
                    f"variable {text} exceeds dimension {self.n}", self.text, pos)
            return E.var(axis)
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect(")")
            return e
        shown = text or "end of input"
        raise ExprSyntaxError(f"unexpected {shown!r}", self.text, pos)


def parse_expr(text: str, n: int) -> E.Expr:
    """Parse ``text`` into an expression over ``n`` coordinates.

    Raises
    ------
    ExprSyntaxError
        On malformed input, unknown identifiers or ``x_k`` with ``k > n``.
    """
    if n < 1:
        raise ValueError("dimension must be at least 1")
    return _Parser(text, n).parse()


_INFIX = {"add": "+", "sub": "-", "mul": "*", "div": "/"}


def to_text(e: E.Expr) -> str:
    """Fully parenthesised text that parses back to the same tree."""
    memo: dict = {}

    def walk(node):
        hit = memo.get(node)
        if hit is not None:
            return hit
        op = node.op
        if op == "var":
            out = f"x{node.value + 1}"
        elif op == "const":
            out = _num(node.value)
        elif op == "neg":
            out = f"(-{walk(node.args[0])})"
        elif op == "pow":
            out = f"({walk(node.args[0])} ^ {_num(node.value)})"
        elif op in _INFIX:
            out = f"({walk(node.args[0])} {_INFIX[op]} {walk(node.args[1])})"
        else:
            out = f"{op}({walk(node.args[0])})"
        memo[node] = out
        return out

    return walk(e)


def _num(v: float) -> str:
    s = repr(float(v))
    return f"({s})" if s.startswith("-") else s
