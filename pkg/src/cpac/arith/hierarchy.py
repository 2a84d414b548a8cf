"""Prenex normal form and arithmetical-hierarchy level.

Bounded quantifiers stay in the matrix.  Unbounded quantifiers under a
bounded one are moved out by collection: ``(Qv < b) (Ez) F`` becomes
``(Ew) (Qv < b) (Ez < w) F`` and dually for ``A``, which is valid over the
naturals.  Blocks from the parts of a conjunction or disjunction are
interleaved to minimise alternations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .formula import And, Exists, ForAll, Formula, Not, Or, Pow2, free_vars

__all__ = ["Level", "DELTA0", "sigma", "pi", "prenex", "classify"]


@dataclass(frozen=True)
class Level:
    kind: str  # "Sigma", "Pi" or "Delta"
    n: int

    def __str__(self):
        return f"{self.kind}_{self.n}"


DELTA0 = Level("Delta", 0)


def sigma(n: int) -> Level:
    return Level("Sigma", n)


def pi(n: int) -> Level:
    return Level("Pi", n)


_Block = tuple[str, tuple[str, ...]]  # ("E" | "A", variables)


class _Fresh:
    def __init__(self, taken):
        self.taken = set(taken)

    def __call__(self, name: str) -> str:
        if name not in self.taken:
            self.taken.add(name)
            return name
        for k in itertools.count(1):
            cand = f"{name}_{k}"
            if cand not in self.taken:
                self.taken.add(cand)
                return cand
        raise AssertionError


def _rename_term(t, env):
    return env.get(t, t) if isinstance(t, str) else t


def _rename_apart(f: Formula, env: dict, fresh: _Fresh) -> Formula:
    if isinstance(f, (ForAll, Exists)):
        b = f.bound
        b = Pow2(_rename_term(b.exponent, env)) if isinstance(b, Pow2) else _rename_term(b, env)
        new = fresh(f.var)
        return type(f)(new, _rename_apart(f.body, {**env, f.var: new}, fresh), b)
    if isinstance(f, (And, Or)):
        return type(f)(*(_rename_apart(p, env, fresh) for p in f.parts))
    if isinstance(f, Not):
        return Not(_rename_apart(f.body, env, fresh))
    if not env:
        return f
    changes = {k: _rename_term(v, env) for k, v in vars(f).items() if isinstance(v, str)}
    return type(f)(**{**vars(f), **changes})


def _push(kind: str, var: str, blocks: list[_Block]) -> list[_Block]:
    if blocks and blocks[0][0] == kind:
        return [(kind, (var,) + blocks[0][1])] + blocks[1:]
    return [(kind, (var,))] + blocks


def _merge(prefixes: list[list[_Block]]) -> list[_Block]:
    """Interleave independent prefixes with as few blocks as possible."""
    best = None
    for start in ("E", "A"):
        queues = [list(p) for p in prefixes if p]
        out: list[_Block] = []
        kind = start
        while any(queues):
            taken = tuple(v for q in queues if q and q[0][0] == kind for v in q.pop(0)[1])
            if taken:
                out.append((kind, taken))
            kind = "A" if kind == "E" else "E"
        if best is None or len(out) < len(best):
            best = out
    return best


def _prenex(f: Formula, fresh: _Fresh) -> tuple[list[_Block], Formula]:
    if isinstance(f, (ForAll, Exists)):
        blocks, matrix = _prenex(f.body, fresh)
        kind = "A" if isinstance(f, ForAll) else "E"
        if f.bound is None:
            return _push(kind, f.var, blocks), matrix
        if not blocks:
            return [], type(f)(f.var, matrix, f.bound)
        # collection: each pulled variable z gets an outer bound variable w_z
        outer, inner = [], matrix
        for bkind, names in blocks:
            outer.append((bkind, tuple(fresh("w_" + z) for z in names)))
        for (bkind, names), (_, ws) in reversed(list(zip(blocks, outer))):
            q = ForAll if bkind == "A" else Exists
            for z, w in reversed(list(zip(names, ws))):
                inner = q(z, inner, w)
        return outer, type(f)(f.var, inner, f.bound)
    if isinstance(f, Not):
        blocks, matrix = _prenex(f.body, fresh)
        return [("E" if k == "A" else "A", vs) for k, vs in blocks], Not(matrix)
    if isinstance(f, (And, Or)):
        parts = [_prenex(p, fresh) for p in f.parts]
        return _merge([b for b, _ in parts]), type(f)(*(m for _, m in parts))
    return [], f


def _prenex_parts(f: Formula):
    g = _rename_apart(f, {}, _Fresh(free_vars(f)))
    fresh = _Fresh(_all_names(g))
    return _prenex(g, fresh)


def _all_names(f: Formula) -> set[str]:
    if isinstance(f, (ForAll, Exists)):
        return {f.var} | _all_names(f.body) | free_vars(f)
    if isinstance(f, (And, Or)):
        return set().union(*(_all_names(p) for p in f.parts))
    if isinstance(f, Not):
        return _all_names(f.body)
    return free_vars(f)


def prenex(f: Formula) -> Formula:
    """An equivalent formula whose unbounded quantifiers all lead."""
    blocks, matrix = _prenex_parts(f)
    for kind, names in reversed(blocks):
        q = ForAll if kind == "A" else Exists
        for v in reversed(names):
            matrix = q(v, matrix)
    return matrix


def classify(f: Formula) -> Level:
    """Level by the number of alternating unbounded quantifier blocks."""
    blocks, _ = _prenex_parts(f)
    if not blocks:
        return DELTA0
    return (sigma if blocks[0][0] == "E" else pi)(len(blocks))
