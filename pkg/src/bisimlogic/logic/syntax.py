"""Abstract syntax, printer and parser for the quantitative modal languages.

The core language L has ``T``, ``not``, ``and``, ``dia(a, .)``, scalar
``add``/``sub`` and, as extras, ``scale`` and convex combination ``cc``.
The variant L' adds ``rew(a)``, ``diap(a, .)`` and truncated ``plus``.

Formulas are immutable and may share subterms freely; synthesised
witnesses are DAGs whose tree expansion is exponentially large, so nothing
in the package walks a formula as a tree except the printer.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from ..errors import FormulaSyntaxError, LanguageError, ScalarOutOfRange, UnknownAction

L, LPRIME = "L", "Lprime"


def _check_scalar(name, r):
    r = float(r)
    if not 0.0 <= r <= 1.0:
        raise ScalarOutOfRange(f"{name} scalar {r!r} outside [0,1]")
    return r


@dataclass(frozen=True)
class Formula:
    lprime: bool = field(init=False, repr=False, compare=False, default=False)

    def children(self) -> tuple:
        return ()

    def _tag(self, own: bool):
        object.__setattr__(self, "lprime", own or any(ch.lprime for ch in self.children()))

    def __post_init__(self):
        self._tag(False)

    @property
    def language(self) -> str:
        return LPRIME if self.lprime else L

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Dia(Formula):
    action: str
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class AddC(Formula):
    arg: Formula
    r: float

    def children(self):
        return (self.arg,)

    def __post_init__(self):
        object.__setattr__(self, "r", _check_scalar("add", self.r))
        self._tag(False)


@dataclass(frozen=True)
class SubC(Formula):
    arg: Formula
    r: float

    def children(self):
        return (self.arg,)

    def __post_init__(self):
        object.__setattr__(self, "r", _check_scalar("sub", self.r))
        self._tag(False)


@dataclass(frozen=True)
class Scale(Formula):
    r: float
    arg: Formula

    def children(self):
        return (self.arg,)

    def __post_init__(self):
        object.__setattr__(self, "r", _check_scalar("scale", self.r))
        self._tag(False)


@dataclass(frozen=True)
class Cx(Formula):
    """``c * left + (1 - c) * right``."""

    c: float
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)

    def __post_init__(self):
        object.__setattr__(self, "c", _check_scalar("cc", self.c))
        self._tag(False)


# -- L' only ------------------------------------------------------------------

@dataclass(frozen=True)
class Rew(Formula):
    action: str

    def __post_init__(self):
        self._tag(True)


@dataclass(frozen=True)
class DiaPrime(Formula):
    action: str
    arg: Formula

    def children(self):
        return (self.arg,)

    def __post_init__(self):
        self._tag(True)


@dataclass(frozen=True)
class Plus(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)

    def __post_init__(self):
        self._tag(True)


TOP = Top()


def Or(p: Formula, q: Formula) -> Formula:
    """Lattice join, ``not(and(not p, not q))``."""
    return Not(And(Not(p), Not(q)))


def const(r: float) -> Formula:
    """The constant ``r`` in the core signature, ``sub(T, 1 - r)``."""
    return SubC(TOP, 1.0 - _check_scalar("constant", r))


def _fold(op, items: Sequence[Formula]) -> Formula:
    items = list(items)
    if not items:
        raise ValueError("cannot fold an empty list of formulas")
    while len(items) > 1:
        nxt = [op(items[i], items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]


def conj(items: Sequence[Formula]) -> Formula:
    """Balanced ``and`` over a nonempty list (keeps DAG depth logarithmic)."""
    return _fold(And, items)


def disj(items: Sequence[Formula]) -> Formula:
    return _fold(Or, items)


def nodes(phi: Formula) -> Iterator[Formula]:
    """Distinct subformula objects, children before parents."""
    seen = set()
    stack = [(phi, False)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in seen:
            continue
        if expanded:
            seen.add(id(node))
            yield node
            continue
        stack.append((node, True))
        for ch in node.children():
            if id(ch) not in seen:
                stack.append((ch, False))


def dag_size(phi: Formula) -> int:
    return sum(1 for _ in nodes(phi))


def actions_of(phi: Formula) -> set:
    return {n.action for n in nodes(phi) if hasattr(n, "action")}


# -- printing ----------------------------------------------------------------

def _num(r: float) -> str:
    return np.format_float_positional(r, trim="-")


def to_text(phi: Formula) -> str:
    """Canonical text; ``parse_formula(to_text(phi)) == phi``."""
    if isinstance(phi, Top):
        return "T"
    if isinstance(phi, Not):
        return f"not({to_text(phi.arg)})"
    if isinstance(phi, And):
        return f"and({to_text(phi.left)}, {to_text(phi.right)})"
    if isinstance(phi, Dia):
        return f"dia({phi.action}, {to_text(phi.arg)})"
    if isinstance(phi, AddC):
        return f"add({to_text(phi.arg)}, {_num(phi.r)})"
    if isinstance(phi, SubC):
        return f"sub({to_text(phi.arg)}, {_num(phi.r)})"
    if isinstance(phi, Scale):
        return f"scale({_num(phi.r)}, {to_text(phi.arg)})"
    if isinstance(phi, Cx):
        return f"cc({_num(phi.c)}, {to_text(phi.left)}, {to_text(phi.right)})"
    if isinstance(phi, Rew):
        return f"rew({phi.action})"
    if isinstance(phi, DiaPrime):
        return f"diap({phi.action}, {to_text(phi.arg)})"
    if isinstance(phi, Plus):
        return f"plus({to_text(phi.left)}, {to_text(phi.right)})"
    raise TypeError(f"not a formula: {phi!r}")


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)|(?P<ident>[^\W\d]\w*)|(?P<punct>[(),]))",
    re.UNICODE,
)

# name -> argument kinds: f = formula, a = action, n = number
_SIGNATURES = {
    "not": "f", "and": "ff", "or": "ff", "dia": "af", "add": "fn", "sub": "fn",
    "scale": "nf", "cc": "nff", "rew": "a", "diap": "af", "plus": "ff",
}
_LPRIME_ONLY = {"rew", "diap", "plus"}


class _Parser:
    def __init__(self, text, actions, language):
        self.text = text
        self.actions = None if actions is None else set(actions)
        self.language = language
        self.tokens = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            mt = _TOKEN.match(text, pos)
            if mt is None or mt.end() == pos:
                raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
            kind = mt.lastgroup
            self.tokens.append((kind, mt.group(kind), mt.start(kind)))
            pos = mt.end()
        self.i = 0

    def peek(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        return ("eof", "", len(self.text))

    def take(self, kind, value=None):
        tok = self.peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise FormulaSyntaxError(f"expected {want!r}, found {got!r}", tok[2])
        self.i += 1
        return tok

    def formula(self) -> Formula:
        kind, word, pos = self.take("ident")
        if word == "T":
            return TOP
        sig = _SIGNATURES.get(word)
        if sig is None:
            raise FormulaSyntaxError(f"unknown operator {word!r}", pos)
        if word in _LPRIME_ONLY and self.language == L:
            raise LanguageError(f"{word!r} is not an operator of the language L (position {pos})")
        self.take("punct", "(")
        args = []
        for k, arg_kind in enumerate(sig):
            if k:
                self.take("punct", ",")
            args.append(self.argument(arg_kind))
        self.take("punct", ")")
        return self.build(word, args)

    def argument(self, kind):
        if kind == "f":
            return self.formula()
        if kind == "a":
            _, name, pos = self.take("ident")
            if self.actions is not None and name not in self.actions:
                raise UnknownAction(name)
            return name
        _, text, pos = self.take("num")
        value = float(text)
        if not 0.0 <= value <= 1.0:
            raise ScalarOutOfRange(f"scalar {text} at position {pos} outside [0,1]")
        return value

    @staticmethod
    def build(word, args):
        if word == "not":
            return Not(*args)
        if word == "and":
            return And(*args)
        if word == "or":
            return Or(*args)
        if word == "dia":
            return Dia(*args)
        if word == "add":
            return AddC(*args)
        if word == "sub":
            return SubC(*args)
        if word == "scale":
            return Scale(*args)
        if word == "cc":
            return Cx(*args)
        if word == "rew":
            return Rew(*args)
        if word == "diap":
            return DiaPrime(*args)
        return Plus(*args)


def parse_formula(text: str, actions: Sequence[str] | None = None, language: str | None = None) -> Formula:
    """Parse formula text.

    ``actions`` restricts action identifiers (``UnknownAction`` otherwise);
    ``language="L"`` rejects the L'-only operators. ``or(p, q)`` is expanded
    to ``not(and(not(p), not(q)))``.
    """
    if language not in (None, L, LPRIME):
        raise ValueError(f"language must be {L!r} or {LPRIME!r}")
    p = _Parser(text, actions, language)
    phi = p.formula()
    tok = p.peek()
    if tok[0] != "eof":
        raise FormulaSyntaxError(f"trailing input {tok[1]!r}", tok[2])
    return phi
