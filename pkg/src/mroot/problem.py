"""Problem-file format: variables, named polynomials, optional point,
box and options.

Line oriented, ``key: value``; ``#`` starts a comment.  Reserved keys are
``vars``, ``point``, ``box`` and ``opts``; any other key names a
polynomial.  Expressions use ``+ - * ^``, decimal literals and
parentheses; multiplication is always explicit.

    # an example
    vars: x1 x2
    f1: x1 - x2 + x1^2
    f2: x1 - x2 + x2^2
    point: 0 0
    box: [-0.01,0.03] [-0.03,0.01]
    opts: tol=1e-8 max_depth=16

Printing a parsed file and re-parsing gives back equal structures.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .dualbasis import Options
from .errors import ProblemParseError
from .intervals import Box
from .polynomials import Polynomial, PolynomialSystem

RESERVED = ("vars", "point", "box", "opts")

_TOKEN = re.compile(r"""
    (?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*^()])
  | (?P<ws>\s+)
""", re.VERBOSE)

_OPT_TYPES = {
    "tol": float,
    "residual_tol": float,
    "max_depth": int,
    "eps_radius": float,
    "seed": int,
}


def _tokenize(text: str, line: int):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ProblemParseError(f"unexpected character {text[pos]!r}",
                                    line, pos + 1)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    tokens.append(("end", "", len(text) + 1))
    return tokens


class _ExprParser:
    """Recursive descent over + - * ^ with explicit multiplication."""

    def __init__(self, tokens, names, line):
        self.tokens = tokens
        self.index = {n: i for i, n in enumerate(names)}
        self.nvars = len(names)
        self.line = line
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ProblemParseError(msg, self.line, tok[2])

    def parse(self) -> Polynomial:
        p = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r} "
                      "(implicit multiplication is not allowed)")
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Polynomial:
        p = self.factor()
        while self.peek()[1] == "*":
            self.take()
            p = p * self.factor()
        return p

    def factor(self) -> Polynomial:
        if self.peek()[1] == "-":
            self.take()
            return -self.factor()
        p = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, text, col = self.take()
            if kind != "num" or not text.isdigit():
                raise ProblemParseError(
                    "exponent must be a non-negative integer", self.line, col)
            p = p ** int(text)
        return p

    def atom(self) -> Polynomial:
        kind, text, col = self.take()
        if kind == "num":
            return Polynomial.constant(float(text), self.nvars)
        if kind == "ident":
            if text not in self.index:
                raise ProblemParseError(f"undeclared variable {text!r}",
                                        self.line, col)
            return Polynomial.variable(self.index[text], self.nvars)
        if text == "(":
            p = self.expr()
            kind, text, col = self.take()
            if text != ")":
                raise ProblemParseError("expected ')'", self.line, col)
            return p
        raise ProblemParseError(f"expected a number, variable or '(', "
                                f"got {text!r}", self.line, col)


def parse_expression(text: str, names, line: int = 0) -> Polynomial:
    return _ExprParser(_tokenize(text, line), names, line).parse()


@dataclass(frozen=True)
class ProblemFile:
    """Parsed problem: variables, named polynomials, optional data."""

    names: tuple
    polynomials: tuple          # (name, Polynomial) in file order
    point: tuple | None = None
    box: Box | None = None
    opts: dict = field(default_factory=dict)

    def system(self) -> PolynomialSystem:
        return PolynomialSystem([p for _, p in self.polynomials], self.names)

    def options(self, **overrides) -> Options:
        kw = {k: v for k, v in self.opts.items()
              if k in ("tol", "residual_tol", "max_depth")}
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return Options(**kw)

    def format(self) -> str:
        lines = ["vars: " + " ".join(self.names)]
        for name, p in self.polynomials:
            lines.append(f"{name}: {p.to_string(self.names)}")
        if self.point is not None:
            lines.append("point: " + " ".join(repr(v) for v in self.point))
        if self.box is not None:
            lines.append("box: " + " ".join(
                f"[{iv.lo!r},{iv.hi!r}]" for iv in self.box))
        if self.opts:
            lines.append("opts: " + " ".join(
                f"{k}={self.opts[k]!r}" for k in sorted(self.opts)))
        return "\n".join(lines) + "\n"


def _parse_point(value: str, line: int) -> tuple:
    out = []
    for part in value.split():
        try:
            out.append(float(part))
        except ValueError:
            raise ProblemParseError(f"bad coordinate {part!r}", line, 1)
    return tuple(out)


_BOX_PART = re.compile(r"\[([^,\]]+),([^,\]]+)\]")


def _parse_box(value: str, line: int) -> Box:
    parts = value.split()
    bounds = []
    for part in parts:
        m = _BOX_PART.fullmatch(part)
        if m is None:
            raise ProblemParseError(
                f"bad interval {part!r}, expected [lo,hi]", line, 1)
        try:
            lo, hi = float(m.group(1)), float(m.group(2))
        except ValueError:
            raise ProblemParseError(f"bad interval bounds {part!r}", line, 1)
        if lo > hi:
            raise ProblemParseError(f"empty interval {part!r}", line, 1)
        bounds.append((lo, hi))
    if not bounds:
        raise ProblemParseError("box needs at least one interval", line, 1)
    return Box.from_bounds(bounds)


def _parse_opts(value: str, line: int) -> dict:
    out = {}
    for part in value.split():
        if "=" not in part:
            raise ProblemParseError(f"bad option {part!r}, expected key=value",
                                    line, 1)
        key, _, raw = part.partition("=")
        if key not in _OPT_TYPES:
            raise ProblemParseError(f"unknown option {key!r}", line, 1)
        try:
            out[key] = _OPT_TYPES[key](raw) if _OPT_TYPES[key] is not float \
                else float(raw)
        except ValueError:
            raise ProblemParseError(f"bad value for option {key!r}", line, 1)
    return out


def parse_problem(text: str) -> ProblemFile:
    names = None
    polys = []
    seen = set()
    point = None
    box = None
    opts = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        if ":" not in stripped:
            raise ProblemParseError("expected 'key: value'", lineno, 1)
        key, _, value = stripped.partition(":")
        key = key.strip()
        value = value.strip()
        if key == "vars":
            if names is not None:
                raise ProblemParseError("duplicate vars line", lineno, 1)
            names = tuple(value.split())
            if not names:
                raise ProblemParseError("vars line declares nothing", lineno, 1)
            if len(set(names)) != len(names):
                raise ProblemParseError("repeated variable name", lineno, 1)
        elif key == "point":
            point = _parse_point(value, lineno)
        elif key == "box":
            box = _parse_box(value, lineno)
        elif key == "opts":
            opts.update(_parse_opts(value, lineno))
        else:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", key):
                raise ProblemParseError(f"bad polynomial name {key!r}",
                                        lineno, 1)
            if names is None:
                raise ProblemParseError(
                    "vars must be declared before polynomials", lineno, 1)
            if key in seen:
                raise ProblemParseError(f"duplicate polynomial {key!r}",
                                        lineno, 1)
            seen.add(key)
            polys.append((key, parse_expression(value, names, lineno)))
    if names is None:
        raise ProblemParseError("missing vars line", 0, 0)
    if not polys:
        raise ProblemParseError("no polynomials declared", 0, 0)
    if point is not None and len(point) != len(names):
        raise ProblemParseError(
            f"point has {len(point)} coordinates for {len(names)} variables",
            0, 0)
    if box is not None and len(box) != len(names):
        raise ProblemParseError(
            f"box has {len(box)} intervals for {len(names)} variables", 0, 0)
    return ProblemFile(names, tuple(polys), point, box, opts)
