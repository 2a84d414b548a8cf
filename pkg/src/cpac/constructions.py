"""Constructive procedures: ERM from a learner, the NFL adversary, and the reductions.

``extract_erm`` turns any learner with a sample-complexity function into an
empirical risk minimiser; ``nfl_adversary`` finds the labeling a learner
handles worst; ``fin_family`` and ``rec_family`` build the stage-``s`` members
of the two hypothesis-class families whose learnability encodes
finiteness and computability of ``W_j``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .classes import Base, ClassSpec, Explicit, Hypothesis
from .errors import MissingSampleComplexity, OracleFailure
from .learn import (
    DEFAULT_BUDGET,
    FiniteDistribution,
    Learner,
    Sample,
    as_sample,
    empirical_error,
    sample_space,
    true_error,
)
from .machine import ce_stage

__all__ = [
    "Extraction",
    "NflResult",
    "extract_erm",
    "nfl_adversary",
    "fin_family",
    "rec_family",
    "threshold_oracle",
    "consistency_by_cases",
    "membership_from_consistency",
]


@dataclass(frozen=True)
class Extraction:
    hypothesis: Hypothesis
    witness: Sample
    a: int
    b: int
    m: int


def extract_erm(A: Learner, S: Sample, mode: str = "exact", b: int = 2, k: int = 20,
                seed: int = 0, budget: int = DEFAULT_BUDGET) -> Extraction:
    """Empirical risk minimiser for ``S`` built from ``A`` and its sample complexity.

    With ``D_S`` the empirical distribution of ``S`` and ``a = n + 1``, any
    sample ``S'`` of size ``m = A.sample_complexity(a, b)`` on which ``A``
    achieved the least empirical error on ``S`` is fine.  ``mode="exact"``
    scans every ``S'`` in ``supp(D_S)^m`` (ties to the first in lexicographic
    order of atom positions); ``mode="randomized"`` draws ``k`` samples, and
    misses a minimiser with probability at most ``b**-k`` when ``A`` meets
    its sample-complexity guarantee.
    """
    S = as_sample(S)
    if A.sample_complexity is None:
        raise MissingSampleComplexity(f"{A.name} has no sample-complexity function")
    D = FiniteDistribution.from_sample(S)
    a = len(S) + 1
    m = A.sample_complexity(a, b)
    if mode == "exact":
        # sorted multiset representatives come out in the same order as their
        # lexicographically first orderings, so ties resolve identically
        candidates = (S2 for S2, _ in sample_space(D, m, ordered=not A.order_invariant, budget=budget))
    elif mode == "randomized":
        rng = random.Random(seed)
        support = D.support
        weights = [w for _, _, w in D.atoms]
        den = len(S)
        cum = list(itertools.accumulate(int(w * den) for w in weights))
        candidates = (
            tuple(support[_bucket(cum, rng.randrange(den))] for _ in range(m)) for _ in range(k)
        )
    else:
        raise ValueError(f"unknown extraction mode {mode!r}")
    best = None
    for S2 in candidates:
        err = empirical_error(A(S2), S)
        if best is None or err < best[0]:
            best = (err, S2)
            if err == 0:
                break
    return Extraction(A(best[1]), best[1], a, b, m)


def _bucket(cum: Sequence[int], r: int) -> int:
    for i, c in enumerate(cum):
        if r < c:
            return i
    raise AssertionError("draw outside the cumulative weights")


@dataclass(frozen=True)
class NflResult:
    labeling: tuple[int, ...]
    p: Fraction
    distribution: FiniteDistribution


def nfl_adversary(A: Learner, m: int, X: Sequence[int], budget: int = DEFAULT_BUDGET) -> NflResult:
    """Labeling ``g`` of ``X`` (``|X| = 2m``) maximising ``P[L_D(A(S)) >= 1/8]``.

    ``D`` is uniform over the graph of ``g`` and ``S ~ D^m``; every labeling
    is tried and every ordered sample enumerated.  Ties go to the
    lexicographically smallest labeling.  The maximum is at least 1/7 for
    any learner.
    """
    X = list(X)
    if len(X) != 2 * m or len(set(X)) != len(X):
        raise ValueError("X must hold 2m distinct points")
    best = None
    for g in itertools.product((0, 1), repeat=len(X)):
        D = FiniteDistribution.uniform(zip(X, g))
        p = sum((w for S, w in sample_space(D, m, ordered=True, budget=budget)
                 if true_error(A(S), D) >= Fraction(1, 8)), Fraction(0))
        if best is None or p > best.p:
            best = NflResult(g, p, D)
    return best


# -- reduction families -----------------------------------------------------

def fin_family(j: int, s: int) -> ClassSpec:
    """Stage ``s`` of ``{h_n : n <= |W_j|}`` over FIN."""
    return ClassSpec(Base.FIN, Explicit(range(len(ce_stage(j, s)) + 1)))


def rec_family(j: int, s: int) -> ClassSpec:
    """Stage ``s`` of ``{h_t : t in W_j} + {h_omega}`` over THD_OMEGA."""
    return ClassSpec(Base.THD_OMEGA, Explicit([0] + [t + 1 for t in sorted(ce_stage(j, s))]))


def threshold_oracle(family: ClassSpec) -> Callable[[int], bool]:
    """Membership of ``Threshold(t)`` in an explicit THD_OMEGA family."""
    if family.base is not Base.THD_OMEGA or not family.is_finite_list:
        raise ValueError("threshold oracles are built from explicit THD_OMEGA families")
    members = set(family.membership.indices)
    return lambda t: t + 1 in members


def consistency_by_cases(member: Callable[[int], bool] | ClassSpec, S: Sample) -> bool:
    """Decide whether a threshold family (with ``h_omega``) realises ``S``.

    ``member(t)`` answers whether ``Threshold(t)`` is in the family; only
    finitely many thresholds are ever queried:

    1. all labels 1: yes, by ``h_omega``;
    2. some ``(x, 0)`` and ``(x', 1)`` with ``x <= x'``: no;
    3. all labels 0: yes iff some member ``t <= min x``;
    4. otherwise, with ``x0`` the largest 1-point and ``x1`` the smallest
       0-point: yes iff some member ``t`` with ``x0 < t <= x1``.
    """
    if isinstance(member, ClassSpec):
        member = threshold_oracle(member)
    S = as_sample(S)
    ones = [x for x, y in S if y == 1]
    zeros = [x for x, y in S if y == 0]
    if not zeros:
        return True
    if ones and min(zeros) <= max(ones):
        return False
    candidates = range(min(zeros) + 1) if not ones else range(max(ones) + 1, min(zeros) + 1)
    try:
        return any(member(t) for t in candidates)
    except Exception as exc:
        raise OracleFailure(f"membership oracle failed: {exc}") from exc


def membership_from_consistency(oracle: Callable[[Sample], bool], t: int) -> bool:
    """Decide ``Threshold(t)`` membership with a single consistency query."""
    query = ((0, 0),) if t == 0 else ((t - 1, 1), (t, 0))
    try:
        return bool(oracle(query))
    except Exception as exc:
        raise OracleFailure(f"consistency oracle failed: {exc}") from exc
