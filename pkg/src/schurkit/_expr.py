"""Tiny arithmetic expression language for symbols loaded from files.

Grammar: + - * / (also the unicode times/divide signs), ^ or ** for powers,
parenthesized calls of abs, sign, exp, sin, cos, sqrt, log, arctan, conj,
re, im and variadic min/max, numeric literals with an optional imaginary
suffix i/j, the constants pi, i, j, and whatever variable names the caller
allows.  Everything evaluates in complex128 and broadcasts over numpy arrays.
"""

from __future__ import annotations

import numpy as np

__all__ = ["ParseError", "compile_expr"]


class ParseError(ValueError):
    """Syntax or binding error; ``position`` is the 0-based character offset."""

    def __init__(self, message, position):
        super().__init__(f"{message} at offset {position}")
        self.position = position


_FUNCTIONS = {
    "abs": (1, np.abs),
    "sign": (1, np.sign),
    "exp": (1, np.exp),
    "sin": (1, np.sin),
    "cos": (1, np.cos),
    "sqrt": (1, np.sqrt),
    "log": (1, np.log),
    "arctan": (1, np.arctan),
    "conj": (1, np.conj),
    "re": (1, np.real),
    "im": (1, np.imag),
    "min": (None, lambda *a: np.minimum.reduce([x.real for x in a]).astype(complex)),
    "max": (None, lambda *a: np.maximum.reduce([x.real for x in a]).astype(complex)),
}

_CONSTANTS = {"pi": complex(np.pi), "i": 1j, "j": 1j, "e": complex(np.e)}


def _tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch.isdigit() or (ch == "." and pos + 1 < n and text[pos + 1].isdigit()):
            start = pos
            while pos < n and (text[pos].isdigit() or text[pos] == "."):
                pos += 1
            # scientific exponent
            if pos < n and text[pos] in "eE" and pos + 1 < n and (
                text[pos + 1].isdigit() or (text[pos + 1] in "+-" and pos + 2 < n and text[pos + 2].isdigit())
            ):
                pos += 2
                while pos < n and text[pos].isdigit():
                    pos += 1
            imag = False
            if pos < n and text[pos] in "ij" and not (pos + 1 < n and (text[pos + 1].isalnum() or text[pos + 1] == "_")):
                imag = True
                pos += 1
            lit = text[start : pos - 1] if imag else text[start:pos]
            try:
                value = float(lit)
            except ValueError:
                raise ParseError(f"bad numeric literal '{text[start:pos]}'", start) from None
            tokens.append(("num", 1j * value if imag else complex(value), start))
            continue
        if ch.isalpha() or ch == "_":
            start = pos
            while pos < n and (text[pos].isalnum() or text[pos] == "_"):
                pos += 1
            tokens.append(("name", text[start:pos], start))
            continue
        if text.startswith("**", pos):
            tokens.append(("op", "^", pos))
            pos += 2
            continue
        if ch in "+-*/^(),":
            tokens.append(("op", ch, pos))
            pos += 1
            continue
        if ch == "×":
            tokens.append(("op", "*", pos))
            pos += 1
            continue
        if ch == "÷":
            tokens.append(("op", "/", pos))
            pos += 1
            continue
        raise ParseError(f"unexpected character '{ch}'", pos)
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.peek()
        if kind != "op" or val != op:
            raise ParseError(f"expected '{op}'", pos)
        self.next()

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing input '{val}'", pos)
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                node = ("bin", val, node, self.term())
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.next()
                node = ("bin", val, node, self.unary())
            else:
                return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.next()
            node = self.unary()
            return node if val == "+" else ("neg", node)
        return self.power()

    def power(self):
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.next()
            return ("bin", "^", base, self.unary())
        return base

    def atom(self):
        kind, val, pos = self.next()
        if kind == "num":
            return ("num", val)
        if kind == "name":
            k, v, _ = self.peek()
            if k == "op" and v == "(":
                self.next()
                args = [self.expr()]
                while True:
                    k2, v2, p2 = self.peek()
                    if k2 == "op" and v2 == ",":
                        self.next()
                        args.append(self.expr())
                    elif k2 == "op" and v2 == ")":
                        self.next()
                        break
                    else:
                        raise ParseError("expected ',' or ')'", p2)
                if val not in _FUNCTIONS:
                    raise ParseError(f"unknown function '{val}'", pos)
                arity = _FUNCTIONS[val][0]
                if arity is not None and len(args) != arity:
                    raise ParseError(f"'{val}' takes {arity} argument(s)", pos)
                if arity is None and len(args) < 2:
                    raise ParseError(f"'{val}' needs at least 2 arguments", pos)
                return ("call", val, args)
            return ("var", val, pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        where = "end of input" if kind == "end" else f"'{val}'"
        raise ParseError(f"expected operand, found {where}", pos)


def _free_vars(node, acc):
    tag = node[0]
    if tag == "var":
        acc.append((node[1], node[2]))
    elif tag == "neg":
        _free_vars(node[1], acc)
    elif tag == "bin":
        _free_vars(node[2], acc)
        _free_vars(node[3], acc)
    elif tag == "call":
        for arg in node[2]:
            _free_vars(arg, acc)


def _evaluate(node, env):
    tag = node[0]
    if tag == "num":
        return node[1]
    if tag == "var":
        name = node[1]
        if name in env:
            return env[name]
        return _CONSTANTS[name]
    if tag == "neg":
        return -_evaluate(node[1], env)
    if tag == "bin":
        op = node[1]
        left = _evaluate(node[2], env)
        right = _evaluate(node[3], env)
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.asarray(left, dtype=complex) / right
        with np.errstate(invalid="ignore"):
            return np.asarray(left, dtype=complex) ** right
    fn = _FUNCTIONS[node[1]][1]
    return fn(*(np.asarray(_evaluate(a, env), dtype=complex) for a in node[2]))


def compile_expr(text, variables):
    """Compile an expression to ``fn(env) -> complex ndarray``.

    ``variables`` is the set of allowed variable names; unknown names raise
    :class:`ParseError` with their position.  Division by zero yields
    non-finite values for the caller's guard policy to handle.
    """
    node = _Parser(text).parse()
    seen = []
    _free_vars(node, seen)
    allowed = set(variables) | set(_CONSTANTS)
    for name, pos in seen:
        if name not in allowed:
            raise ParseError(f"unbound variable '{name}'", pos)

    def fn(env):
        return np.asarray(_evaluate(node, env), dtype=complex)

    fn.variables = sorted({name for name, _ in seen if name in set(variables)})
    fn.source = text
    return fn
