"""Brute-force evaluation of formulas with every unbounded quantifier capped.

Formulas are compiled once into closures over a slot array, so the inner
loops do no tree walking.  Atom results that need machine runs are memoised.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable

from ..classes import All, Base, ClassSpec, Decidable, Explicit, decode_hypothesis
from ..machine import ce_stage, decode_seq, run_bounded
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
    free_vars,
)

__all__ = ["eval_bounded", "decode_sample", "strong_index_members", "stage_members"]


def strong_index_members(u: int) -> tuple[int, ...]:
    """Elements of the finite set ``D_u``, i.e. the positions of 1-bits of ``u``, ascending."""
    return tuple(k for k in range(u.bit_length()) if u >> k & 1)


def decode_sample(code: int) -> tuple[tuple[int, int], ...]:
    """The nonempty sample coded by ``code``; each entry ``e`` is the pair ``(e // 2, e % 2)``."""
    return tuple((e >> 1, e & 1) for e in decode_seq(code + 1))


@lru_cache(maxsize=1 << 20)
def _label(base: Base, h: int, x: int) -> int:
    return decode_hypothesis(base, h)(x)


@lru_cache(maxsize=1 << 16)
def _stage_card(j: int, s: int) -> int:
    return len(ce_stage(j, s))


@lru_cache(maxsize=1 << 16)
def _in_ce(x: int, j: int, s: int) -> bool:
    return run_bounded(j, x, s) is not None


def stage_members(cls: ClassRef, s: int) -> list[tuple[Base, int]]:
    """(base, index) pairs of the members enumerated by stage ``s``."""
    if isinstance(cls, FamilyRef):
        if cls.kind == "fin":
            return [(Base.FIN, n) for n in range(min(s, _stage_card(cls.program, s) + 1))]
        return [(Base.THD_OMEGA, 0)] + [(Base.THD_OMEGA, t + 1) for t in sorted(ce_stage(cls.program, s))]
    m = cls.membership
    if isinstance(m, All):
        idx = range(s)
    elif isinstance(m, Explicit):
        idx = sorted(i for i in set(m.indices) if i < s)
    elif isinstance(m, Decidable):
        idx = [i for i in range(s) if run_bounded(m.decider, i, s) not in (None, 0)]
    else:
        idx = [i for i in range(s) if run_bounded(m.enumerator, i, s) is not None]
    return [(cls.base, i) for i in idx]


def _consistency_stage(cls: ClassRef) -> Callable[[int, int], bool]:
    @lru_cache(maxsize=1 << 16)
    def member(x: int, s: int) -> bool:
        S = decode_sample(x)
        return any(all(_label(base, h, p) == y for p, y in S) for base, h in stage_members(cls, s))

    return member


def _in_class(spec: ClassSpec) -> Callable[[int], bool]:
    return lru_cache(maxsize=1 << 16)(spec.is_member)


def _compile(f: Formula, slots: dict[str, int], cap: int, top: int):
    def term(t):
        if isinstance(t, int):
            return lambda env: t
        i = slots[t]
        return lambda env: env[i]

    if isinstance(f, (ForAll, Exists)):
        b = f.bound
        if b is None:
            limit = lambda env: cap  # noqa: E731
        elif isinstance(b, Pow2):
            e = term(b.exponent)
            limit = lambda env: 1 << e(env)  # noqa: E731
        else:
            limit = term(b)
        slot = top
        body = _compile(f.body, {**slots, f.var: slot}, cap, top + 1)
        if isinstance(f, Exists):
            def run(env):
                for v in range(limit(env)):
                    env[slot] = v
                    if body(env):
                        return True
                return False
        else:
            def run(env):
                for v in range(limit(env)):
                    env[slot] = v
                    if not body(env):
                        return False
                return True
        return run
    if isinstance(f, (And, Or)):
        parts = [_compile(p, slots, cap, top) for p in f.parts]
        if isinstance(f, And):
            run = lambda env: all(p(env) for p in parts)  # noqa: E731
        else:
            run = lambda env: any(p(env) for p in parts)  # noqa: E731
        return run
    if isinstance(f, Not):
        body = _compile(f.body, slots, cap, top)
        run = lambda env: not body(env)  # noqa: E731
        return run
    if isinstance(f, HypothesisDisagrees):
        base, h, x, y = f.base, term(f.h), term(f.x), term(f.y)
        return lambda env: _label(base, h(env), x(env)) != y(env)
    if isinstance(f, SetDisagrees):
        base, h, u, v = f.base, term(f.h), term(f.u), term(f.v)

        def run(env):
            hh, vv = h(env), v(env)
            return any(_label(base, hh, p) != (vv >> k & 1)
                       for k, p in enumerate(strong_index_members(u(env))))
        return run
    if isinstance(f, SetSize):
        u, d = term(f.u), term(f.d)
        return lambda env: u(env).bit_count() == d(env)
    if isinstance(f, StageCardAtLeast):
        j, n, s = term(f.j), term(f.n), term(f.s)
        return lambda env: n(env) <= _stage_card(j(env), s(env))
    if isinstance(f, HaltsWithin):
        i, x, s = term(f.i), term(f.x), term(f.s)
        return lambda env: run_bounded(i(env), x(env), s(env)) is not None
    if isinstance(f, InCeStage):
        x, d, s = term(f.x), term(f.d), term(f.s)
        return lambda env: _in_ce(x(env), d(env), s(env))
    if isinstance(f, Less):
        a, b2 = term(f.left), term(f.right)
        return lambda env: a(env) < b2(env)
    if isinstance(f, InClass):
        member, h = _in_class(f.cls), term(f.h)
        return lambda env: member(h(env))
    if isinstance(f, InConsistencyStage):
        member, x, s = _consistency_stage(f.cls), term(f.x), term(f.s)
        return lambda env: member(x(env), s(env))
    raise TypeError(f"not a formula: {f!r}")


def _quantifiers(f: Formula) -> int:
    if isinstance(f, (ForAll, Exists)):
        return 1 + _quantifiers(f.body)
    if isinstance(f, (And, Or)):
        return sum(map(_quantifiers, f.parts))
    if isinstance(f, Not):
        return _quantifiers(f.body)
    return 0


def eval_bounded(f: Formula, bound: int, env: dict[str, int] | None = None) -> bool:
    """Truth of ``f`` with every unbounded quantifier ranging over ``[0, bound)``.

    Free variables take their values from ``env``.  This is the truth of a
    relativisation, not of ``f`` itself.
    """
    if bound < 0:
        raise ValueError("bound must be a natural number")
    env = dict(env or {})
    missing = free_vars(f) - env.keys()
    if missing:
        raise ValueError(f"unassigned free variables: {sorted(missing)}")
    names = sorted(env)
    slots = {n: i for i, n in enumerate(names)}
    run = _compile(f, slots, bound, len(names))
    regs = [env[n] for n in names] + [0] * _quantifiers(f)
    return bool(run(regs))
