"""Formula syntax trees and their S-expression text form.

The grammar is documented in ``docs/formula-grammar.md``.  Terms are variable
names (``str``) or natural-number constants (``int``).  A quantifier bound is
``None`` (unbounded), a term, or ``Pow2(term)``; ``x < bound`` is the range.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from ..classes import All, Base, BudgetPolicy, ClassSpec, Decidable, Enumerable, Explicit
from ..errors import FormatError

__all__ = [
    "Term",
    "Pow2",
    "FamilyRef",
    "ClassRef",
    "ForAll",
    "Exists",
    "And",
    "Or",
    "Not",
    "HypothesisDisagrees",
    "SetDisagrees",
    "SetSize",
    "StageCardAtLeast",
    "HaltsWithin",
    "InCeStage",
    "Less",
    "InClass",
    "InConsistencyStage",
    "Formula",
    "ATOMS",
    "to_text",
    "parse_formula",
    "free_vars",
]

Term = Union[str, int]


@dataclass(frozen=True)
class Pow2:
    exponent: Term


@dataclass(frozen=True)
class FamilyRef:
    """Member ``j`` of the ``fin`` or ``rec`` reduction family."""

    kind: str
    program: int

    def __post_init__(self):
        if self.kind not in ("fin", "rec"):
            raise ValueError("family kind is 'fin' or 'rec'")


ClassRef = Union[ClassSpec, FamilyRef]
Bound = Union[None, Term, Pow2]


@dataclass(frozen=True)
class ForAll:
    var: str
    body: "Formula"
    bound: Bound = None


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"
    bound: Bound = None


@dataclass(frozen=True)
class And:
    parts: tuple["Formula", ...]

    def __init__(self, *parts):
        object.__setattr__(self, "parts", tuple(parts))


@dataclass(frozen=True)
class Or:
    parts: tuple["Formula", ...]

    def __init__(self, *parts):
        object.__setattr__(self, "parts", tuple(parts))


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class HypothesisDisagrees:
    """``h(x) != y`` for hypothesis index ``h`` of ``base``."""

    base: Base
    h: Term
    x: Term
    y: Term


@dataclass(frozen=True)
class SetDisagrees:
    """Some ``k < |D_u|``: ``h`` labels the ``k``-th element of ``D_u`` differently from bit ``k`` of ``v``."""

    base: Base
    h: Term
    u: Term
    v: Term


@dataclass(frozen=True)
class SetSize:
    """``|D_u| = d`` where ``D_u`` is the finite set with strong index ``u``."""

    u: Term
    d: Term


@dataclass(frozen=True)
class StageCardAtLeast:
    """``n <= |W_{j,s}|``."""

    j: Term
    n: Term
    s: Term


@dataclass(frozen=True)
class HaltsWithin:
    i: Term
    x: Term
    s: Term


@dataclass(frozen=True)
class InCeStage:
    """``x in W_{d,s}``."""

    x: Term
    d: Term
    s: Term


@dataclass(frozen=True)
class Less:
    left: Term
    right: Term


@dataclass(frozen=True)
class InClass:
    cls: ClassSpec
    h: Term


@dataclass(frozen=True)
class InConsistencyStage:
    """The sample coded by ``x`` is realised by a member enumerated by stage ``s``."""

    cls: ClassRef
    x: Term
    s: Term


ATOMS = (HypothesisDisagrees, SetDisagrees, SetSize, StageCardAtLeast, HaltsWithin,
         InCeStage, Less, InClass, InConsistencyStage)

Formula = Union[ForAll, Exists, And, Or, Not, HypothesisDisagrees, SetDisagrees, SetSize,
                StageCardAtLeast, HaltsWithin, InCeStage, Less, InClass, InConsistencyStage]


def free_vars(f: Formula) -> set[str]:
    if isinstance(f, (ForAll, Exists)):
        inner = free_vars(f.body) - {f.var}
        b = f.bound.exponent if isinstance(f.bound, Pow2) else f.bound
        if isinstance(b, str):
            inner.add(b)
        return inner
    if isinstance(f, (And, Or)):
        return set().union(*(free_vars(p) for p in f.parts))
    if isinstance(f, Not):
        return free_vars(f.body)
    return {t for t in _atom_terms(f) if isinstance(t, str)}


def _atom_terms(f) -> tuple[Term, ...]:
    return tuple(getattr(f, name) for name in _ATOM_FIELDS[type(f)])


# -- text form ---------------------------------------------------------------

_ATOM_NAMES = {
    HypothesisDisagrees: "disagrees",
    SetDisagrees: "set-disagrees",
    SetSize: "set-size",
    StageCardAtLeast: "stage-card-at-least",
    HaltsWithin: "halts-within",
    InCeStage: "in-ce-stage",
    Less: "lt",
    InClass: "in-class",
    InConsistencyStage: "in-consistency-stage",
}
_ATOM_FIELDS = {
    HypothesisDisagrees: ("h", "x", "y"),
    SetDisagrees: ("h", "u", "v"),
    SetSize: ("u", "d"),
    StageCardAtLeast: ("j", "n", "s"),
    HaltsWithin: ("i", "x", "s"),
    InCeStage: ("x", "d", "s"),
    Less: ("left", "right"),
    InClass: ("h",),
    InConsistencyStage: ("x", "s"),
}
_BY_NAME = {v: k for k, v in _ATOM_NAMES.items()}


def _class_text(c: ClassRef) -> str:
    if isinstance(c, FamilyRef):
        return f"(family {c.kind} {c.program})"
    m = c.membership
    if isinstance(m, All):
        tail = "all"
    elif isinstance(m, Explicit):
        tail = " ".join(["explicit", *map(str, m.indices)])
    elif isinstance(m, Decidable):
        tail = f"decidable {m.decider} {m.budget.initial} {m.budget.cap}"
    else:
        tail = f"enumerable {m.enumerator} {m.budget.initial} {m.budget.cap}"
    return f"(class {c.base.value} {tail})"


def _bound_text(b: Bound) -> str:
    if b is None:
        return ""
    if isinstance(b, Pow2):
        return f" :below (pow2 {b.exponent})"
    return f" :below {b}"


def to_text(f: Formula) -> str:
    """Canonical one-line S-expression."""
    if isinstance(f, ForAll):
        return f"(forall {f.var}{_bound_text(f.bound)} {to_text(f.body)})"
    if isinstance(f, Exists):
        return f"(exists {f.var}{_bound_text(f.bound)} {to_text(f.body)})"
    if isinstance(f, And):
        return "(and" + "".join(" " + to_text(p) for p in f.parts) + ")"
    if isinstance(f, Or):
        return "(or" + "".join(" " + to_text(p) for p in f.parts) + ")"
    if isinstance(f, Not):
        return f"(not {to_text(f.body)})"
    head = [_ATOM_NAMES[type(f)]]
    if isinstance(f, (HypothesisDisagrees, SetDisagrees)):
        head.append(f.base.value)
    if isinstance(f, (InClass, InConsistencyStage)):
        head.append(_class_text(f.cls))
    head.extend(str(t) for t in _atom_terms(f))
    return "(" + " ".join(head) + ")"


_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


def _tokens(text: str) -> Iterator[str]:
    pos = 0
    text = "\n".join(line.split(";", 1)[0] for line in text.splitlines())
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise FormatError(f"unexpected text at offset {pos}")
            return
        pos = m.end()
        yield m.group(1) or m.group(2) or m.group(3)


def _read(tokens: list[str], i: int):
    if i >= len(tokens):
        raise FormatError("unexpected end of formula")
    tok = tokens[i]
    if tok == ")":
        raise FormatError("unbalanced ')'")
    if tok != "(":
        return tok, i + 1
    out = []
    i += 1
    while True:
        if i >= len(tokens):
            raise FormatError("missing ')'")
        if tokens[i] == ")":
            return out, i + 1
        item, i = _read(tokens, i)
        out.append(item)


def _term(tok) -> Term:
    if isinstance(tok, list):
        raise FormatError(f"expected a term, got {tok!r}")
    if tok.isdigit():
        return int(tok)
    if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok):
        raise FormatError(f"bad variable name {tok!r}")
    return tok


def _base(tok) -> Base:
    try:
        return Base(tok)
    except (ValueError, TypeError):
        raise FormatError(f"unknown base {tok!r}") from None


def _class(sx) -> ClassRef:
    try:
        return _class_or_raise(sx)
    except (ValueError, TypeError):
        raise FormatError(f"bad class reference {sx!r}") from None


def _class_or_raise(sx) -> ClassRef:
    if not isinstance(sx, list) or len(sx) < 3:
        raise FormatError(f"bad class reference {sx!r}")
    if sx[0] == "family":
        return FamilyRef(sx[1], int(sx[2]))
    if sx[0] != "class":
        raise FormatError(f"bad class reference {sx!r}")
    base, kind, args = _base(sx[1]), sx[2], [int(a) for a in sx[3:]]
    if kind == "all":
        return ClassSpec(base, All())
    if kind == "explicit":
        return ClassSpec(base, Explicit(args))
    if kind in ("decidable", "enumerable") and len(args) == 3:
        policy = BudgetPolicy(args[1], args[2])
        rep = Decidable(args[0], policy) if kind == "decidable" else Enumerable(args[0], policy)
        return ClassSpec(base, rep)
    raise FormatError(f"bad class reference {sx!r}")


def _build(sx) -> Formula:
    if not isinstance(sx, list) or not sx:
        raise FormatError(f"expected a formula, got {sx!r}")
    head, rest = sx[0], sx[1:]
    if head in ("forall", "exists"):
        if not rest:
            raise FormatError(f"malformed quantifier {sx!r}")
        cls = ForAll if head == "forall" else Exists
        var = _term(rest[0])
        bound: Bound = None
        if len(rest) == 4 and rest[1] == ":below":
            b = rest[2]
            if isinstance(b, list) and len(b) == 2 and b[0] == "pow2":
                bound = Pow2(_term(b[1]))
            elif isinstance(b, str):
                bound = _term(b)
            else:
                raise FormatError(f"bad bound {b!r}")
            body = rest[3]
        elif len(rest) == 2:
            body = rest[1]
        else:
            raise FormatError(f"malformed quantifier {sx!r}")
        if not isinstance(var, str):
            raise FormatError("quantified variables must be names")
        return cls(var, _build(body), bound)
    if head == "and":
        return And(*map(_build, rest))
    if head == "or":
        return Or(*map(_build, rest))
    if head == "not" and len(rest) == 1:
        return Not(_build(rest[0]))
    atom = _BY_NAME.get(head)
    if atom is None:
        raise FormatError(f"unknown operator {head!r}")
    fields = _ATOM_FIELDS[atom]
    lead = []
    if atom in (HypothesisDisagrees, SetDisagrees):
        if not rest:
            raise FormatError(f"{head} needs a base")
        lead, rest = [_base(rest[0])], rest[1:]
    elif atom in (InClass, InConsistencyStage):
        if not rest:
            raise FormatError(f"{head} needs a class")
        c = _class(rest[0])
        if atom is InClass and isinstance(c, FamilyRef):
            raise FormatError("in-class takes an explicit class, not a family")
        lead, rest = [c], rest[1:]
    if len(rest) != len(fields):
        raise FormatError(f"{head} takes {len(fields)} terms")
    return atom(*lead, *map(_term, rest))


def parse_formula(text: str) -> Formula:
    tokens = list(_tokens(text))
    sx, end = _read(tokens, 0)
    if end != len(tokens):
        raise FormatError("trailing text after formula")
    return _build(sx)
