"""First-order statements expressing learnability of a class or family member.

``build_vc_lt(C, d)`` says no ``d`` distinct points are shattered:

    (A x1 < ... < xd) (E y1..yd < 2) (A h in C) (E i <= d) h(xi) != yi

``build_pac(C)`` quantifies the dimension, coding point sets by strong
indices ``u`` (``|D_u| = d``) and labelings by ``v < 2**d``.
``build_scpac(C)`` adds that the consistency set of ``C`` is decidable: its
stage approximations are disjoint from some ``W_e`` whose union with them
exhausts the naturals.
"""

from __future__ import annotations

from typing import Callable

from ..classes import All, Base, Enumerable
from .formula import (
    And,
    ClassRef,
    Exists,
    FamilyRef,
    ForAll,
    Formula,
    HaltsWithin,
    HypothesisDisagrees,
    InCeStage,
    InClass,
    InConsistencyStage,
    Less,
    Not,
    Or,
    Pow2,
    SetDisagrees,
    SetSize,
    StageCardAtLeast,
    Term,
)

__all__ = ["for_all_members", "build_vc_lt", "build_vc_lt_coded", "build_pac", "build_scpac", "emit", "EMIT_KINDS"]

EMIT_KINDS = ("vc", "pac", "scpac")


def _implies(guard: Formula, body: Formula) -> Formula:
    return Or(Not(guard), body)


def for_all_members(cls: ClassRef, body: Callable[[Base, Term], Formula], h: str = "h") -> Formula:
    """``(A h in cls) body(base, h)`` with membership rendered over hypothesis indices."""
    if isinstance(cls, FamilyRef):
        if cls.kind == "fin":
            return ForAll(h, ForAll("s", _implies(StageCardAtLeast(cls.program, h, "s"), body(Base.FIN, h))))
        # h_omega, then every h_t with t enumerated into W_j
        return And(
            body(Base.THD_OMEGA, 0),
            ForAll(h, ForAll("s", _implies(InCeStage(h, cls.program, "s"), body(Base.THD, h)))),
        )
    m = cls.membership
    if isinstance(m, All):
        return ForAll(h, body(cls.base, h))
    if isinstance(m, Enumerable):
        return ForAll(h, ForAll("s", _implies(HaltsWithin(m.enumerator, h, "s"), body(cls.base, h))))
    return ForAll(h, _implies(InClass(cls, h), body(cls.base, h)))


def build_vc_lt(cls: ClassRef, d: int) -> Formula:
    """No ``d`` distinct naturals are shattered by ``cls``."""
    if d < 1:
        raise ValueError("d must be at least 1")
    xs = [f"x{i}" for i in range(1, d + 1)]
    ys = [f"y{i}" for i in range(1, d + 1)]

    def miss(base, h):
        return Or(*(HypothesisDisagrees(base, h, x, y) for x, y in zip(xs, ys)))

    core: Formula = for_all_members(cls, miss)
    for y in reversed(ys):
        core = Exists(y, core, 2)
    if d > 1:
        core = _implies(And(*(Less(a, b) for a, b in zip(xs, xs[1:]))), core)
    for x in reversed(xs):
        core = ForAll(x, core)
    return core


def build_vc_lt_coded(cls: ClassRef, d: Term = "d") -> Formula:
    """``build_vc_lt`` with ``d`` a term: point sets as strong indices, labelings as bit vectors."""
    inner = for_all_members(cls, lambda base, h: SetDisagrees(base, h, "u", "v"))
    return ForAll("u", _implies(SetSize("u", d), Exists("v", inner, Pow2(d))))


def build_pac(cls: ClassRef) -> Formula:
    """Finite VC dimension: ``(E d) [VCdim < d]``."""
    return Exists("d", build_vc_lt_coded(cls, "d"))


def build_scpac(cls: ClassRef) -> Formula:
    """Finite VC dimension and a decidable consistency set."""
    disjoint = ForAll("s", ForAll("x", Or(Not(InConsistencyStage(cls, "x", "s")), Not(InCeStage("x", "e", "s")))))
    covering = ForAll("x", Exists("s", Or(InConsistencyStage(cls, "x", "s"), InCeStage("x", "e", "s"))))
    return And(build_pac(cls), Exists("e", And(disjoint, covering)))


def emit(kind: str, cls: ClassRef, d: int | None = None) -> Formula:
    if kind == "vc":
        if d is None:
            raise ValueError("kind 'vc' needs d")
        return build_vc_lt(cls, d)
    if kind == "pac":
        return build_pac(cls)
    if kind == "scpac":
        return build_scpac(cls)
    raise ValueError(f"unknown kind {kind!r}; expected one of {EMIT_KINDS}")
