"""Hypotheses, base-class decodings and index-set representations of classes.

Base-class codings (``decode_hypothesis`` / ``encode_hypothesis``):

``FIN``
    ``i = 2 * r + tail``; ``r`` ranks the nonempty bit string ``prefix`` in
    shortlex order (``r = int("1" + prefix, 2) - 2``) and ``cut = len(prefix) - 1``.
    This is a bijection between the naturals and finite-support triples.
``IVL``
    ``(a, b) = unpair(i)``, ``Interval(lo=a, hi=a + b + 1)``.
``THD``
    ``i -> Threshold(i)``.
``THD_OMEGA``
    ``0 -> Threshold(OMEGA)``, ``i + 1 -> Threshold(i)``.
``INIT``
    ``i -> InitStage(i)``.

Thresholds follow ``h_t(x) = 1 iff x < t`` throughout.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

from .errors import BudgetExhausted, UnknownAtCutoff
from .machine import pair, run_bounded, unpair

__all__ = [
    "OMEGA",
    "FiniteSupport",
    "Interval",
    "Threshold",
    "InitStage",
    "MachineBacked",
    "Hypothesis",
    "Base",
    "BudgetPolicy",
    "All",
    "Explicit",
    "Decidable",
    "Enumerable",
    "ClassSpec",
    "decode_hypothesis",
    "encode_hypothesis",
    "evaluate",
    "restrict",
    "restriction_is_exact",
    "halt_class_stage",
    "breakpoint",
    "representatives",
]


class _Omega(enum.Enum):
    OMEGA = "omega"

    def __repr__(self):
        return "OMEGA"


OMEGA = _Omega.OMEGA


@dataclass(frozen=True)
class FiniteSupport:
    cut: int
    prefix: tuple[int, ...]
    tail: int

    def __post_init__(self):
        if len(self.prefix) != self.cut + 1:
            raise ValueError("prefix must label exactly 0..cut")
        if any(b not in (0, 1) for b in self.prefix) or self.tail not in (0, 1):
            raise ValueError("labels are bits")

    def __call__(self, x: int) -> int:
        return self.prefix[x] if x <= self.cut else self.tail


@dataclass(frozen=True)
class Interval:
    lo: int
    hi: int

    def __post_init__(self):
        if not 0 <= self.lo < self.hi:
            raise ValueError("interval needs 0 <= lo < hi")

    def __call__(self, x: int) -> int:
        return int(self.lo < x < self.hi)


@dataclass(frozen=True)
class Threshold:
    t: int | _Omega

    def __call__(self, x: int) -> int:
        return 1 if self.t is OMEGA else int(x < self.t)


@dataclass(frozen=True)
class InitStage:
    s: int

    def __call__(self, x: int) -> int:
        return int(run_bounded(x, x, self.s) is not None)


@dataclass(frozen=True)
class MachineBacked:
    """Program ``index`` read as a classifier: nonzero output means label 1."""

    index: int
    budget: int

    def __call__(self, x: int) -> int:
        y = run_bounded(self.index, x, self.budget)
        if y is None:
            raise BudgetExhausted(f"program {self.index} undecided on {x} at budget {self.budget}")
        return int(y != 0)


Hypothesis = Union[FiniteSupport, Interval, Threshold, InitStage, MachineBacked]


def evaluate(h: Hypothesis, x: int) -> int:
    return h(x)


def breakpoint(h: Hypothesis) -> int:
    """A point ``M`` such that ``h`` is constant on ``[M, oo)``."""
    if isinstance(h, FiniteSupport):
        return h.cut + 1
    if isinstance(h, Interval):
        return h.hi
    if isinstance(h, Threshold):
        return 0 if h.t is OMEGA else h.t
    if isinstance(h, InitStage):
        return h.s
    raise TypeError(f"no closed-form breakpoint for {h!r}")


# -- base classes -----------------------------------------------------------

class Base(enum.Enum):
    FIN = "FIN"
    IVL = "IVL"
    THD = "THD"
    THD_OMEGA = "THD_OMEGA"
    INIT = "INIT"


def decode_hypothesis(base: Base, i: int) -> Hypothesis:
    if i < 0:
        raise ValueError("hypothesis indices are natural numbers")
    if base is Base.FIN:
        bits = bin((i >> 1) + 2)[3:]
        return FiniteSupport(len(bits) - 1, tuple(int(b) for b in bits), i & 1)
    if base is Base.IVL:
        a, b = unpair(i)
        return Interval(a, a + b + 1)
    if base is Base.THD:
        return Threshold(i)
    if base is Base.THD_OMEGA:
        return Threshold(OMEGA) if i == 0 else Threshold(i - 1)
    if base is Base.INIT:
        return InitStage(i)
    raise ValueError(f"unknown base {base!r}")


def encode_hypothesis(base: Base, h: Hypothesis) -> int:
    """Inverse of :func:`decode_hypothesis`; ValueError if ``h`` is not of ``base``'s form."""
    if base is Base.FIN and isinstance(h, FiniteSupport):
        rank = int("1" + "".join(map(str, h.prefix)), 2) - 2
        return 2 * rank + h.tail
    if base is Base.IVL and isinstance(h, Interval):
        return pair(h.lo, h.hi - h.lo - 1)
    if base is Base.THD and isinstance(h, Threshold) and h.t is not OMEGA:
        return h.t
    if base is Base.THD_OMEGA and isinstance(h, Threshold):
        return 0 if h.t is OMEGA else h.t + 1
    if base is Base.INIT and isinstance(h, InitStage):
        return h.s
    raise ValueError(f"{h!r} is not a {base.value} hypothesis")


# -- index-set representations ---------------------------------------------

@dataclass(frozen=True)
class BudgetPolicy:
    """Step budgets tried in turn: ``initial``, doubling, up to ``cap``."""

    initial: int = 64
    cap: int = 1 << 16

    def __post_init__(self):
        if not 1 <= self.initial <= self.cap:
            raise ValueError("budget policy needs 1 <= initial <= cap")

    def budgets(self) -> Iterator[int]:
        b = self.initial
        while b < self.cap:
            yield b
            b *= 2
        yield self.cap


@dataclass(frozen=True)
class All:
    pass


@dataclass(frozen=True)
class Explicit:
    indices: tuple[int, ...] = ()

    def __init__(self, indices: Sequence[int] = ()):
        object.__setattr__(self, "indices", tuple(indices))


@dataclass(frozen=True)
class Decidable:
    """Member iff program ``decider`` halts on the index with nonzero output."""

    decider: int
    budget: BudgetPolicy = field(default_factory=BudgetPolicy)


@dataclass(frozen=True)
class Enumerable:
    """Member iff program ``enumerator`` halts on the index (checked at ``budget.cap``)."""

    enumerator: int
    budget: BudgetPolicy = field(default_factory=BudgetPolicy)


Membership = Union[All, Explicit, Decidable, Enumerable]


@dataclass(frozen=True)
class ClassSpec:
    base: Base
    membership: Membership = All()

    def is_member(self, i: int) -> bool:
        m = self.membership
        if isinstance(m, All):
            return True
        if isinstance(m, Explicit):
            return i in m.indices
        if isinstance(m, Decidable):
            for b in m.budget.budgets():
                y = run_bounded(m.decider, i, b)
                if y is not None:
                    return y != 0
            raise BudgetExhausted(f"decider {m.decider} undecided on {i} at budget {m.budget.cap}")
        return run_bounded(m.enumerator, i, m.budget.cap) is not None

    def member_indices(self, cutoff: int | None = None) -> Iterator[int]:
        """Member indices in increasing order; ``cutoff`` bounds non-explicit scans."""
        m = self.membership
        if isinstance(m, Explicit):
            yield from sorted(set(m.indices))
            return
        scan = itertools.count() if cutoff is None else range(cutoff)
        if cutoff is None and not isinstance(m, All):
            raise UnknownAtCutoff("a cutoff is needed to scan an enumerated class")
        for i in scan:
            if self.is_member(i):
                yield i

    def members(self, cutoff: int | None = None) -> Iterator[tuple[int, Hypothesis]]:
        for i in self.member_indices(cutoff):
            yield i, decode_hypothesis(self.base, i)

    @property
    def is_finite_list(self) -> bool:
        return isinstance(self.membership, Explicit)


_CLOSED_FORM = (Base.THD, Base.THD_OMEGA, Base.IVL, Base.FIN)


def restriction_is_exact(spec: ClassSpec) -> bool:
    return spec.is_finite_list or (isinstance(spec.membership, All) and spec.base in _CLOSED_FORM)


def _labels(h: Hypothesis, xs: Sequence[int]) -> tuple[int, ...]:
    return tuple(h(x) for x in xs)


def restrict(spec: ClassSpec, X, cutoff: int | None = None) -> frozenset[tuple[int, ...]]:
    """Labelings of ``sorted(X)`` realised by the class.

    Exact for explicit lists and for the closed-form bases with ``All``
    membership; otherwise only members with index below ``cutoff`` are seen.
    """
    xs = sorted(set(X))
    if not xs:
        raise ValueError("restrict needs a nonempty point set")
    if isinstance(spec.membership, All) and spec.base in _CLOSED_FORM:
        return frozenset(_labels(h, xs) for h in representatives(spec.base, xs))
    if cutoff is None and not spec.is_finite_list:
        raise UnknownAtCutoff(f"restricting a {type(spec.membership).__name__} class needs a cutoff")
    if cutoff is not None and cutoff < 1:
        raise ValueError("cutoff must be positive")
    return frozenset(_labels(h, xs) for _, h in spec.members(cutoff))


def representatives(base: Base, xs: Sequence[int]) -> Iterator[Hypothesis]:
    """One hypothesis of ``base`` for each distinct restriction to the sorted points ``xs``."""
    if base is Base.FIN:
        top = xs[-1]
        for labels in itertools.product((0, 1), repeat=len(xs)):
            bits = [0] * (top + 1)
            for x, y in zip(xs, labels):
                bits[x] = y
            yield FiniteSupport(top, tuple(bits), 0)
        return
    if base in (Base.THD, Base.THD_OMEGA):
        yield Threshold(0)
        for x in xs:
            yield Threshold(x + 1)
        if base is Base.THD_OMEGA:
            yield Threshold(OMEGA)
        return
    los = sorted({x - 1 for x in xs if x >= 1} | {xs[-1]})
    his = sorted({x + 1 for x in xs})
    for lo in los:
        for hi in his:
            if lo < hi:
                yield Interval(lo, hi)


def halt_class_stage(s: int) -> ClassSpec:
    """Stage-``s`` surrogate of the halting class, as explicit FIN indices.

    ``h_i(x) = 1`` iff ``x = 2i``, or ``x = 2i + 1`` and program ``i`` halts on
    ``i`` by stage ``s``; one hypothesis for each ``i < s``.
    """
    indices = []
    for i in range(s):
        halts = run_bounded(i, i, s) is not None
        bits = [0] * (2 * i + 2)
        bits[2 * i] = 1
        bits[2 * i + 1] = int(halts)
        indices.append(encode_hypothesis(Base.FIN, FiniteSupport(2 * i + 1, tuple(bits), 0)))
    return ClassSpec(Base.FIN, Explicit(indices))
