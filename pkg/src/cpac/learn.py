"""Errors, consistency, ERM, sample complexity and PAC verification.

All probabilities and errors are :class:`fractions.Fraction`.  A sample is a
tuple of ``(x, y)`` pairs; repetitions are allowed.
"""

from __future__ import annotations

import bisect
import enum
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .classes import (
    OMEGA,
    All,
    Base,
    ClassSpec,
    Hypothesis,
    Threshold,
    representatives,
    restriction_is_exact,
)
from .errors import (
    EmptySample,
    EnumerationBudgetExceeded,
    InfiniteVC,
    NoHypothesisFound,
    UnknownAtCutoff,
)

__all__ = [
    "Sample",
    "FiniteDistribution",
    "Consistency",
    "Learner",
    "PacCheck",
    "McCheck",
    "DEFAULT_BUDGET",
    "as_sample",
    "empirical_error",
    "true_error",
    "consistent",
    "erm",
    "erm_indexed",
    "sample_complexity",
    "erm_learner",
    "constant_learner",
    "scpac_learner",
    "min_true_error",
    "sample_space",
    "pac_verify_exact",
    "pac_verify_mc",
]

Sample = tuple[tuple[int, int], ...]

DEFAULT_BUDGET = 10**7


def as_sample(pairs: Iterable[Sequence[int]]) -> Sample:
    S = tuple((int(x), int(y)) for x, y in pairs)
    if not S:
        raise EmptySample("samples must be nonempty")
    for x, y in S:
        if x < 0 or y not in (0, 1):
            raise ValueError(f"bad sample pair {(x, y)}")
    return S


@dataclass(frozen=True)
class FiniteDistribution:
    """Finitely supported distribution over labelled points, exact weights."""

    atoms: tuple[tuple[int, int, Fraction], ...]

    def __post_init__(self):
        atoms = tuple((int(x), int(y), Fraction(w)) for x, y, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValueError("empty distribution")
        if any(w <= 0 for _, _, w in atoms):
            raise ValueError("weights must be positive")
        if sum(w for _, _, w in atoms) != 1:
            raise ValueError("weights must sum to exactly 1")
        if len({(x, y) for x, y, _ in atoms}) != len(atoms):
            raise ValueError("atoms must be distinct")
        if any(y not in (0, 1) or x < 0 for x, y, _ in atoms):
            raise ValueError("atoms are (natural, bit) pairs")

    @classmethod
    def uniform(cls, pairs: Iterable[Sequence[int]]) -> "FiniteDistribution":
        return cls.from_sample(as_sample(pairs))

    @classmethod
    def from_sample(cls, S: Sample) -> "FiniteDistribution":
        """``D_S``: mass ``1/n`` per sample entry, repeated entries added up."""
        S = as_sample(S)
        counts: dict[tuple[int, int], int] = {}
        for xy in S:
            counts[xy] = counts.get(xy, 0) + 1
        return cls(tuple((x, y, Fraction(c, len(S))) for (x, y), c in sorted(counts.items())))

    @property
    def support(self) -> list[tuple[int, int]]:
        return [(x, y) for x, y, _ in self.atoms]

    @property
    def points(self) -> list[int]:
        return sorted({x for x, _, _ in self.atoms})


def empirical_error(h: Hypothesis, S: Sample) -> Fraction:
    if not S:
        raise EmptySample("empirical error of an empty sample")
    return Fraction(sum(1 for x, y in S if h(x) != y), len(S))


def true_error(h: Hypothesis, D: FiniteDistribution) -> Fraction:
    return sum((w for x, y, w in D.atoms if h(x) != y), Fraction(0))


# -- consistency and ERM ----------------------------------------------------

class Consistency(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown-at-cutoff"


def _structured_consistent(base: Base, S: Sample) -> bool:
    ones = {x for x, y in S if y == 1}
    zeros = {x for x, y in S if y == 0}
    if ones & zeros:
        return False
    if base is Base.FIN:
        return True
    if base in (Base.THD, Base.THD_OMEGA):
        return max(ones, default=-1) < min(zeros, default=math.inf)
    # IVL: 0 is never inside an interval, and the ones must form a gap-free run
    if not ones:
        return True
    lo, hi = min(ones), max(ones)
    return lo >= 1 and not any(lo <= x <= hi for x in zeros)


def consistent(spec: ClassSpec, S: Sample, cutoff: int | None = None) -> Consistency:
    """Is ``S`` realised by some member?  ``UNKNOWN`` only for enumerated classes."""
    S = as_sample(S)
    if isinstance(spec.membership, All) and spec.base is not Base.INIT:
        return Consistency.YES if _structured_consistent(spec.base, S) else Consistency.NO
    if cutoff is None and not spec.is_finite_list:
        raise UnknownAtCutoff("consistency for an enumerated class needs a cutoff")
    for _, h in spec.members(cutoff):
        if all(h(x) == y for x, y in S):
            return Consistency.YES
    return Consistency.NO if spec.is_finite_list else Consistency.UNKNOWN


def _relabelings(ys: tuple[int, ...], flips: int) -> list[tuple[int, ...]]:
    out = []
    for pos in itertools.combinations(range(len(ys)), flips):
        z = list(ys)
        for p in pos:
            z[p] ^= 1
        out.append(tuple(z))
    out.sort()
    return out


def erm_indexed(spec: ClassSpec, S: Sample, cutoff: int | None = None) -> tuple[int, Hypothesis]:
    """ERM through consistency queries; returns ``(index, hypothesis)``.

    For ``k = 0, 1, ..., n`` every relabeling ``z`` of the sample that flips
    exactly ``k`` labels is tried in lexicographic order.  At the first ``z``
    the class can realise, members are scanned in index order and the first
    one with exactly ``k`` mistakes on ``S`` is returned.
    """
    S = as_sample(S)
    xs = tuple(x for x, _ in S)
    ys = tuple(y for _, y in S)
    n = len(S)
    scan_cutoff = None if isinstance(spec.membership, All) and spec.base is not Base.INIT else cutoff
    for k in range(n + 1):
        for z in _relabelings(ys, k):
            answer = consistent(spec, tuple(zip(xs, z)), cutoff)
            if answer is Consistency.UNKNOWN:
                raise UnknownAtCutoff(f"consistency of {tuple(zip(xs, z))} unsettled below cutoff {cutoff}")
            if answer is Consistency.YES:
                target = Fraction(k, n)
                for i, h in spec.members(scan_cutoff):
                    if empirical_error(h, S) == target:
                        return i, h
                raise NoHypothesisFound("consistent relabeling found but no member attains it")
    raise NoHypothesisFound("the class is empty")


def erm(spec: ClassSpec, S: Sample, cutoff: int | None = None) -> Hypothesis:
    return erm_indexed(spec, S, cutoff)[1]


# -- sample complexity ------------------------------------------------------

def sample_complexity(d: int, a: int, b: int) -> int:
    """Agnostic ERM sample size for VC dimension ``d``, accuracy ``1/a``, confidence ``1/b``.

    Uses the uniform-convergence bound ``(64/eps^2)(2 d ln(12/eps) + ln(4/delta))``
    (Anthony and Bartlett) at ``eps = 1/a`` and ``delta = 1/(2b)``; halving
    delta turns the bound's "at most delta" into the strict "< 1/b".
    """
    if d < 0 or a < 1 or b < 1:
        raise ValueError("need d >= 0 and a, b >= 1")
    return math.ceil(64 * a * a * (2 * d * math.log(12 * a) + math.log(8 * b)))


# -- learners ---------------------------------------------------------------

@dataclass
class Learner:
    """A total map from samples to hypotheses.

    ``order_invariant`` learners depend only on the multiset of the sample;
    the verifiers then enumerate multisets with multinomial weights instead
    of ordered sequences.
    """

    fn: Callable[[Sample], Hypothesis]
    sample_complexity: Callable[[int, int], int] | None = None
    proper_for: ClassSpec | None = None
    name: str = "learner"
    order_invariant: bool = False
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __call__(self, S: Sample) -> Hypothesis:
        key = tuple(sorted(S)) if self.order_invariant else tuple(S)
        try:
            return self._cache[key]
        except KeyError:
            h = self._cache[key] = self.fn(as_sample(S))
            return h

    def with_sample_complexity(self, m: int | Callable[[int, int], int]) -> "Learner":
        """Same map, with ``m`` (a constant or a function of ``(a, b)``) as its sample complexity."""
        fn = m if callable(m) else (lambda a, b: m)
        return Learner(self.fn, fn, self.proper_for, self.name, self.order_invariant, self._cache)


def erm_learner(spec: ClassSpec, cutoff: int | None = None) -> Learner:
    return Learner(lambda S: erm(spec, S, cutoff), None, spec, "erm", order_invariant=True)


def constant_learner(bit: int) -> Learner:
    h = Threshold(0) if bit == 0 else Threshold(OMEGA)
    return Learner(lambda S: h, None, None, f"constant-{bit}", order_invariant=True)


def scpac_learner(spec: ClassSpec, cutoff: int | None = None, domain_bound: int = 1 << 12) -> Learner:
    """ERM paired with the uniform-convergence sample complexity of the class."""
    from .vc import INFINITE, vc_exact

    d = vc_exact(spec, domain_bound)
    if d is INFINITE:
        raise InfiniteVC("the class shatters arbitrarily large sets")
    learner = erm_learner(spec, cutoff)
    learner.sample_complexity = lambda a, b: sample_complexity(d, a, b)
    learner.name = "scpac-erm"
    return learner


# -- exact and sampled verification ----------------------------------------

def min_true_error(spec: ClassSpec, D: FiniteDistribution, cutoff: int | None = None) -> Fraction:
    """Best in-class risk; exact for structured bases, over members below ``cutoff`` otherwise."""
    if restriction_is_exact(spec) and not spec.is_finite_list:
        candidates: Iterable[Hypothesis] = representatives(spec.base, D.points)
    else:
        if cutoff is None and not spec.is_finite_list:
            raise UnknownAtCutoff("best in-class risk of an enumerated class needs a cutoff")
        candidates = [h for _, h in spec.members(cutoff)]
    best = min((true_error(h, D) for h in candidates), default=None)
    if best is None:
        raise UnknownAtCutoff("no member found below the cutoff")
    return best


def sample_space(D: FiniteDistribution, m: int, ordered: bool = True,
                 budget: int = DEFAULT_BUDGET) -> Iterator[tuple[Sample, Fraction]]:
    """All length-``m`` samples from ``D`` with their probabilities.

    ``ordered=False`` yields one sorted representative per multiset, weighted
    by its multinomial coefficient; the weights still sum to exactly 1.
    """
    if m < 1:
        raise ValueError("sample size must be positive")
    k = len(D.atoms)
    size = k**m if ordered else math.comb(m + k - 1, k - 1)
    if size > budget:
        raise EnumerationBudgetExceeded(f"{size} samples exceed the enumeration budget {budget}")
    pairs = [(x, y) for x, y, _ in D.atoms]
    weights = [w for _, _, w in D.atoms]
    if ordered:
        for idx in itertools.product(range(k), repeat=m):
            w = Fraction(1)
            for i in idx:
                w *= weights[i]
            yield tuple(pairs[i] for i in idx), w
        return
    fact_m = math.factorial(m)
    for idx in itertools.combinations_with_replacement(range(k), m):
        coef = fact_m
        w = Fraction(1)
        for i, c in _runs(idx):
            coef //= math.factorial(c)
            w *= weights[i] ** c
        yield tuple(pairs[i] for i in idx), coef * w


def _runs(idx: Sequence[int]) -> Iterator[tuple[int, int]]:
    for key, grp in itertools.groupby(idx):
        yield key, sum(1 for _ in grp)


@dataclass(frozen=True)
class PacCheck:
    p: Fraction
    satisfied: bool
    best_risk: Fraction
    samples: int
    total_weight: Fraction


def pac_verify_exact(A: Learner, spec: ClassSpec, D: FiniteDistribution, m: int, a: int, b: int,
                     cutoff: int | None = None, budget: int = DEFAULT_BUDGET,
                     best_risk: Fraction | None = None, ordered: bool | None = None) -> PacCheck:
    """Exact ``P[L_D(A(S)) > min_H L_D + 1/a]`` over ``S ~ D^m``; satisfied iff ``p < 1/b``.

    Order-invariant learners are checked over multisets unless ``ordered`` forces
    the full ``|supp D|**m`` sequence enumeration.
    """
    opt = min_true_error(spec, D, cutoff) if best_risk is None else best_risk
    bar = opt + Fraction(1, a)
    p = total = Fraction(0)
    count = 0
    if ordered is None:
        ordered = not A.order_invariant
    for S, w in sample_space(D, m, ordered=ordered, budget=budget):
        total += w
        count += 1
        if true_error(A(S), D) > bar:
            p += w
    assert total == 1, "sample weights must sum to one"
    return PacCheck(p, p < Fraction(1, b), opt, count, total)


@dataclass(frozen=True)
class McCheck:
    p_hat: Fraction
    ci: float
    trials: int


def pac_verify_mc(A: Learner, spec: ClassSpec, D: FiniteDistribution, m: int, a: int, b: int,
                  trials: int, seed: int, cutoff: int | None = None) -> McCheck:
    """Monte-Carlo estimate of the same failure probability, 4-sigma half-width."""
    if trials < 1:
        raise ValueError("need at least one trial")
    bar = min_true_error(spec, D, cutoff) + Fraction(1, a)
    pairs = D.support
    den = math.lcm(*(w.denominator for _, _, w in D.atoms))
    cum = list(itertools.accumulate(int(w * den) for _, _, w in D.atoms))
    rng = random.Random(seed)
    risk: dict[Sample, bool] = {}
    bad = 0
    for _ in range(trials):
        idx = [bisect.bisect_right(cum, rng.randrange(den)) for _ in range(m)]
        S = tuple(pairs[i] for i in idx)
        key = tuple(sorted(S)) if A.order_invariant else S
        if key not in risk:
            risk[key] = true_error(A(S), D) > bar
        bad += risk[key]
    p_hat = Fraction(bad, trials)
    return McCheck(p_hat, 4 * math.sqrt(float(p_hat * (1 - p_hat)) / trials), trials)
