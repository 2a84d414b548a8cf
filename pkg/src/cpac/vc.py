"""Shattering and VC dimension."""

from __future__ import annotations

import enum
import itertools
from typing import Sequence

from .classes import All, Base, ClassSpec, Hypothesis, breakpoint, restrict, restriction_is_exact
from .errors import DomainBoundTooSmall
from .machine import run_bounded

__all__ = ["INFINITE", "shatters", "vc_exact", "vc_lower_bound", "shattered_by"]


class _Infinite(enum.Enum):
    INFINITE = "infinite"

    def __repr__(self):
        return "INFINITE"


INFINITE = _Infinite.INFINITE


def shatters(spec: ClassSpec, X, cutoff: int | None = None) -> bool:
    """True iff every labeling of ``X`` is realised.

    For classes seen only below ``cutoff`` a True answer is a certificate and
    a False answer means "not shattered at this cutoff".
    """
    return len(restrict(spec, X, cutoff)) == 2 ** len(set(X))


def shattered_by(rows: Sequence[Sequence[int]], cols: Sequence[int]) -> bool:
    """Whether the label matrix ``rows`` (one row per hypothesis) shatters ``cols``."""
    return len({tuple(r[c] for c in cols) for r in rows}) == 2 ** len(cols)


def vc_exact(spec: ClassSpec, domain_bound: int = 1 << 12, stage_cap: int = 1 << 12):
    """Exact VC dimension for structured classes; ``INFINITE`` for FIN.

    Explicit lists are searched over one representative per group of points
    that every member labels alike, which needs all breakpoints below
    ``domain_bound``.  INIT is a chain under pointwise order, so its dimension
    is 1 as soon as some ``x < domain_bound`` halts on itself by ``stage_cap``.
    """
    m = spec.membership
    if isinstance(m, All):
        if spec.base in (Base.THD, Base.THD_OMEGA):
            return 1
        if spec.base is Base.IVL:
            return 2
        if spec.base is Base.FIN:
            return INFINITE
        if spec.base is Base.INIT:
            if any(run_bounded(x, x, stage_cap) is not None for x in range(min(domain_bound, stage_cap))):
                return 1
            raise DomainBoundTooSmall("no self-halting program found below the bounds")
    if not spec.is_finite_list:
        raise ValueError("vc_exact needs All membership on a structured base or an explicit list")
    hyps = [h for _, h in spec.members()]
    return _vc_of_list(hyps, domain_bound)


def _vc_of_list(hyps: list[Hypothesis], domain_bound: int) -> int:
    if len(hyps) < 2:
        return 0
    top = max(breakpoint(h) for h in hyps)
    if top >= domain_bound:
        raise DomainBoundTooSmall(f"breakpoints reach {top}, domain bound is {domain_bound}")
    columns = {}
    for x in range(top + 1):
        col = tuple(h(x) for h in hyps)
        if 0 < sum(col) < len(col):
            columns.setdefault(col, x)
    points = sorted(columns.values())
    rows = [[h(x) for x in range(top + 1)] for h in hyps]
    best = 0
    for d in range(1, len(hyps).bit_length()):
        if not any(shattered_by(rows, c) for c in itertools.combinations(points, d)):
            break
        best = d
    return best


def vc_lower_bound(spec: ClassSpec, d: int, domain_bound: int, cutoff: int | None = None):
    """Lexicographically smallest ``d``-subset of ``[0, domain_bound)`` that is shattered.

    Returns a tuple or None; None is no proof that the dimension is below ``d``.
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    if restriction_is_exact(spec) and not spec.is_finite_list:
        for X in itertools.combinations(range(domain_bound), d):
            if shatters(spec, X):
                return X
        return None
    hyps = [h for _, h in spec.members(cutoff)]
    if len(hyps) < 2 ** d:
        return None
    rows = [[h(x) for x in range(domain_bound)] for h in hyps]
    for X in itertools.combinations(range(domain_bound), d):
        if shattered_by(rows, X):
            return X
    return None
