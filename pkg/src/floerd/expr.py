"""Knot expressions.

Grammar (whitespace is ignored between tokens)::

    expr   := term ('+' term)*
    term   := INT '*' term | atom
    atom   := 'unknot' | 'dtref' | 'torus:' INT ',' INT | 'lp:' INT | '(' expr ')'

``A + B`` is connected sum (tensor product of complexes) and ``k*A`` the
k-fold connected sum.  Only the torus knots T(p-1, p) with p odd are
available.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Union

from .complex import BifilteredComplex, tensor, tensor_power, unknot
from .errors import KnotExprError, SizeGuardError
from .knots import doubled_trefoil_model, lp_complex, max_generators, torus_staircase

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<word>[a-z]+)|(?P<sym>[+*():,]))")


@dataclass(frozen=True)
class Atom:
    kind: str
    args: tuple = ()


@dataclass(frozen=True)
class Sum:
    parts: tuple


@dataclass(frozen=True)
class Multiple:
    k: int
    body: "Node"


Node = Union[Atom, Sum, Multiple]


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise KnotExprError(f"unexpected character {text[start]!r}", text, start)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self, kind: str, value: Optional[str] = None):
        tok = self.peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise KnotExprError(f"expected {want!r}, got {got!r}", self.text, tok[2])
        self.k += 1
        return tok

    def expr(self) -> Node:
        parts = [self.term()]
        while self.peek()[:2] == ("sym", "+"):
            self.k += 1
            parts.append(self.term())
        return parts[0] if len(parts) == 1 else Sum(tuple(parts))

    def term(self) -> Node:
        tok = self.peek()
        if tok[0] == "int":
            k = int(self.take("int")[1])
            self.take("sym", "*")
            if k < 1:
                raise KnotExprError("multiplier must be positive", self.text, tok[2])
            return Multiple(k, self.term())
        return self.atom()

    def atom(self) -> Node:
        tok = self.peek()
        if tok[:2] == ("sym", "("):
            self.k += 1
            node = self.expr()
            self.take("sym", ")")
            return node
        if tok[0] != "word":
            got = tok[1] or "end of input"
            raise KnotExprError(f"expected a knot, got {got!r}", self.text, tok[2])
        self.k += 1
        word = tok[1]
        if word in ("unknot", "dtref"):
            return Atom(word)
        if word == "torus":
            self.take("sym", ":")
            a = self.take("int")
            self.take("sym", ",")
            b = self.take("int")
            if int(b[1]) != int(a[1]) + 1 or int(b[1]) % 2 == 0 or int(b[1]) < 3:
                raise KnotExprError("only torus:<p-1>,<p> with p odd >= 3 is supported",
                                    self.text, a[2])
            return Atom("torus", (int(b[1]),))
        if word == "lp":
            self.take("sym", ":")
            p = self.take("int")
            return Atom("lp", (int(p[1]),))
        raise KnotExprError(f"unknown knot {word!r}", self.text, tok[2])


def parse(text: str) -> Node:
    p = _Parser(text)
    node = p.expr()
    p.take("end")
    return node


def _guard(n: int, allow_large: bool) -> None:
    if not allow_large and n > max_generators():
        raise SizeGuardError(n, max_generators(), "knot expression")


def build(node: Node, allow_large: bool = False) -> BifilteredComplex:
    if isinstance(node, Atom):
        if node.kind == "unknot":
            return unknot()
        if node.kind == "dtref":
            return doubled_trefoil_model()
        if node.kind == "torus":
            return torus_staircase(node.args[0])
        return lp_complex(node.args[0], allow_large=allow_large)
    if isinstance(node, Multiple):
        body = build(node.body, allow_large)
        _guard(body.n ** node.k, allow_large)
        return tensor_power(body, node.k)
    parts: List[BifilteredComplex] = [build(n, allow_large) for n in node.parts]
    total = 1
    for c in parts:
        total *= c.n
    _guard(total, allow_large)
    out = parts[0]
    for c in parts[1:]:
        out = tensor(out, c)
    return out


def knot_complex(text: str, allow_large: bool = False) -> BifilteredComplex:
    """Parse and build a knot expression such as ``torus:4,5 + 2*dtref``."""
    return build(parse(text), allow_large)
