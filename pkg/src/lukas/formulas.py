"""Propositional/modal formula trees, parsing, printing, substitution, matching.

Negation is surface sugar only: ``~A`` parses to ``Implies(A, Bottom)`` and the
printer re-sugars that shape back to ``~A``.  The connective set is fixed to
{and, or, implies, bottom} plus box in K4 mode.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional


class Mode(enum.Enum):
    INT = "int"
    K4 = "k4"

    def __str__(self) -> str:
        return self.value


class ParseError(ValueError):
    """Raised on malformed formula text; carries the 0-based offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ModeError(ValueError):
    """A formula uses connectives not available in the requested mode."""


@dataclass(frozen=True)
class Formula:
    def __str__(self) -> str:
        return render(self)

    # dataclass hash recomputes structurally on every call; formulas end up
    # as dict/set keys on hot paths, so cache it.
    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = self._compute_hash()
            object.__setattr__(self, "_hash", h)
        return h

    def _compute_hash(self) -> int:
        raise NotImplementedError


@dataclass(frozen=True, eq=True)
class Var(Formula):
    name: str

    def _compute_hash(self) -> int:
        return hash(("var", self.name))


@dataclass(frozen=True, eq=True)
class Bottom(Formula):
    def _compute_hash(self) -> int:
        return hash("bot")


@dataclass(frozen=True, eq=True)
class And(Formula):
    left: Formula
    right: Formula

    def _compute_hash(self) -> int:
        return hash(("and", self.left, self.right))


@dataclass(frozen=True, eq=True)
class Or(Formula):
    left: Formula
    right: Formula

    def _compute_hash(self) -> int:
        return hash(("or", self.left, self.right))


@dataclass(frozen=True, eq=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def _compute_hash(self) -> int:
        return hash(("implies", self.left, self.right))


@dataclass(frozen=True, eq=True)
class Box(Formula):
    inner: Formula

    def _compute_hash(self) -> int:
        return hash(("box", self.inner))


BOT = Bottom()

#: A substitution is a finite map from variable names to formulas.
Substitution = Mapping[str, Formula]


def neg(a: Formula) -> Formula:
    return Implies(a, BOT)


def conj(parts: list[Formula]) -> Formula:
    """Left-associated conjunction of a nonempty list."""
    acc = parts[0]
    for p in parts[1:]:
        acc = And(acc, p)
    return acc


def disj(parts: list[Formula]) -> Formula:
    """Left-associated disjunction of a nonempty list."""
    acc = parts[0]
    for p in parts[1:]:
        acc = Or(acc, p)
    return acc


def subformulas(a: Formula) -> Iterator[Formula]:
    """All subformulas, each distinct tree yielded once, outside-in."""
    seen: set[Formula] = set()
    stack = [a]
    while stack:
        f = stack.pop()
        if f in seen:
            continue
        seen.add(f)
        yield f
        if isinstance(f, (And, Or, Implies)):
            stack.append(f.left)
            stack.append(f.right)
        elif isinstance(f, Box):
            stack.append(f.inner)


def variables(a: Formula) -> frozenset[str]:
    return frozenset(f.name for f in subformulas(a) if isinstance(f, Var))


def has_box(a: Formula) -> bool:
    return any(isinstance(f, Box) for f in subformulas(a))


def check_mode(a: Formula, mode: Mode) -> None:
    if mode is Mode.INT and has_box(a):
        raise ModeError(f"modality not allowed in {mode} mode: {render(a)}")


def apply_substitution(s: Substitution, a: Formula) -> Formula:
    """Replace every mapped variable simultaneously; unmapped ones stay fixed."""
    if isinstance(a, Var):
        return s.get(a.name, a)
    if isinstance(a, Bottom):
        return a
    if isinstance(a, And):
        return And(apply_substitution(s, a.left), apply_substitution(s, a.right))
    if isinstance(a, Or):
        return Or(apply_substitution(s, a.left), apply_substitution(s, a.right))
    if isinstance(a, Implies):
        return Implies(apply_substitution(s, a.left), apply_substitution(s, a.right))
    if isinstance(a, Box):
        return Box(apply_substitution(s, a.inner))
    raise TypeError(f"not a formula: {a!r}")


def match_instance(pattern: Formula, target: Formula) -> Optional[dict[str, Formula]]:
    """One-sided matching: the substitution on vars(pattern) sending pattern to
    target, or None if no such substitution exists."""
    binding: dict[str, Formula] = {}

    def walk(p: Formula, t: Formula) -> bool:
        if isinstance(p, Var):
            bound = binding.get(p.name)
            if bound is None:
                binding[p.name] = t
                return True
            return bound == t
        if isinstance(p, Bottom):
            return isinstance(t, Bottom)
        if isinstance(p, And):
            return isinstance(t, And) and walk(p.left, t.left) and walk(p.right, t.right)
        if isinstance(p, Or):
            return isinstance(t, Or) and walk(p.left, t.left) and walk(p.right, t.right)
        if isinstance(p, Implies):
            return isinstance(t, Implies) and walk(p.left, t.left) and walk(p.right, t.right)
        if isinstance(p, Box):
            return isinstance(t, Box) and walk(p.inner, t.inner)
        raise TypeError(f"not a formula: {p!r}")

    return binding if walk(pattern, target) else None


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<impl>->|→)
  | (?P<and>&|∧)
  | (?P<or>\||∨)
  | (?P<not>~|¬|∼)
  | (?P<box>\[\]|□)
  | (?P<bot>bot\b|⊥)
  | (?P<ident>[a-z][a-z0-9_]*)
  | (?P<lp>\()
  | (?P<rp>\))
""",
    re.VERBOSE,
)

# precedence levels used by the printer; higher binds tighter
_PREC_IMPL = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_UNARY = 4


class _Parser:
    def __init__(self, text: str, mode: Mode):
        self.text = text
        self.mode = mode
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            kind = m.lastgroup
            assert kind is not None
            if kind != "ws":
                self.tokens.append((kind, m.group(), pos))
            pos = m.end()
        self.tokens.append(("eof", "", len(text)))
        self.index = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.index]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def parse(self) -> Formula:
        f = self.implication()
        kind, value, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected token {value!r}", pos)
        return f

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek()[0] == "impl":
            self.advance()
            right = self.implication()
            return Implies(left, right)
        return left

    def disjunction(self) -> Formula:
        acc = self.conjunction()
        while self.peek()[0] == "or":
            self.advance()
            acc = Or(acc, self.conjunction())
        return acc

    def conjunction(self) -> Formula:
        acc = self.unary()
        while self.peek()[0] == "and":
            self.advance()
            acc = And(acc, self.unary())
        return acc

    def unary(self) -> Formula:
        kind, _, pos = self.peek()
        if kind == "not":
            self.advance()
            return neg(self.unary())
        if kind == "box":
            if self.mode is Mode.INT:
                raise ParseError("modality not allowed in int mode", pos)
            self.advance()
            return Box(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        kind, value, pos = self.advance()
        if kind == "ident":
            return Var(value)
        if kind == "bot":
            return BOT
        if kind == "lp":
            f = self.implication()
            kind, value, pos = self.advance()
            if kind != "rp":
                raise ParseError("expected ')'", pos)
            return f
        raise ParseError(f"expected a formula, found {value!r}" if value else "unexpected end of input", pos)


def parse_formula(text: str, mode: Mode = Mode.INT) -> Formula:
    return _Parser(text, mode).parse()


def render(a: Formula) -> str:
    """ASCII rendering; parse_formula(render(a), mode) reproduces the tree."""

    def go(f: Formula, min_prec: int) -> str:
        if isinstance(f, Var):
            return f.name
        if isinstance(f, Bottom):
            return "bot"
        if isinstance(f, Implies):
            if isinstance(f.right, Bottom):
                return "~" + go(f.left, _PREC_UNARY + 1)
            body = go(f.left, _PREC_IMPL + 1) + " -> " + go(f.right, _PREC_IMPL)
            return "(" + body + ")" if min_prec > _PREC_IMPL else body
        if isinstance(f, Or):
            body = go(f.left, _PREC_OR) + " | " + go(f.right, _PREC_OR + 1)
            return "(" + body + ")" if min_prec > _PREC_OR else body
        if isinstance(f, And):
            body = go(f.left, _PREC_AND) + " & " + go(f.right, _PREC_AND + 1)
            return "(" + body + ")" if min_prec > _PREC_AND else body
        if isinstance(f, Box):
            return "[]" + go(f.inner, _PREC_UNARY + 1)
        raise TypeError(f"not a formula: {f!r}")

    return go(a, 0)
