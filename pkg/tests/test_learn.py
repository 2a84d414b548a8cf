import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpac.classes import OMEGA, Base, ClassSpec, Enumerable, Explicit, Interval, Threshold, decode_hypothesis
from cpac.errors import EmptySample, EnumerationBudgetExceeded, InfiniteVC, NoHypothesisFound, UnknownAtCutoff
from cpac.learn import (
    Consistency,
    FiniteDistribution,
    consistent,
    constant_learner,
    empirical_error,
    erm,
    erm_indexed,
    erm_learner,
    pac_verify_exact,
    pac_verify_mc,
    sample_complexity,
    sample_space,
    scpac_learner,
    true_error,
)
from cpac.machine import encode
from cpac.programs import EVENS

from oracles import min_empirical_error, ordered_failure_probability

THD = ClassSpec(Base.THD)
IVL = ClassSpec(Base.IVL)
HALF = Fraction(1, 2)

samples = st.lists(st.tuples(st.integers(0, 8), st.integers(0, 1)), min_size=1, max_size=6).map(tuple)


def test_empirical_error_examples():
    assert empirical_error(Threshold(0), ((1, 0), (2, 1))) == HALF
    assert empirical_error(Threshold(3), ((1, 1), (2, 1), (3, 0), (4, 1))) == Fraction(1, 4)
    with pytest.raises(EmptySample):
        empirical_error(Threshold(1), ())


def test_true_error_examples():
    D = FiniteDistribution.uniform([(0, 1), (1, 1), (2, 1), (3, 0)])
    assert true_error(Threshold(2), D) == Fraction(1, 4)
    assert true_error(Threshold(3), D) == 0
    assert true_error(Threshold(0), FiniteDistribution.uniform([(0, 1), (5, 1)])) == 1


def test_distribution_validation():
    with pytest.raises(ValueError):
        FiniteDistribution(((0, 1, HALF),))
    with pytest.raises(ValueError):
        FiniteDistribution(((0, 1, HALF), (0, 1, HALF)))
    with pytest.raises(ValueError):
        FiniteDistribution(((0, 2, Fraction(1)),))
    D = FiniteDistribution.from_sample(((3, 1), (1, 0), (3, 1)))
    assert D.atoms == ((1, 0, Fraction(1, 3)), (3, 1, Fraction(2, 3)))


def test_consistency_examples():
    assert consistent(ClassSpec(Base.THD_OMEGA), ((0, 1), (9, 1))) is Consistency.YES
    assert consistent(THD, ((1, 0), (2, 1))) is Consistency.NO
    assert consistent(IVL, ((1, 0), (2, 1), (3, 0))) is Consistency.YES
    assert consistent(IVL, ((0, 1),)) is Consistency.NO
    assert consistent(ClassSpec(Base.FIN), ((2, 1), (2, 0))) is Consistency.NO
    evens = ClassSpec(Base.THD, Enumerable(encode(EVENS)))
    assert consistent(evens, ((1, 1), (2, 0)), cutoff=5) is Consistency.YES
    assert consistent(evens, ((2, 1), (3, 0)), cutoff=5) is Consistency.UNKNOWN
    with pytest.raises(UnknownAtCutoff):
        consistent(evens, ((0, 1),))


@pytest.mark.parametrize("base", [Base.THD, Base.THD_OMEGA, Base.IVL, Base.FIN])
@settings(max_examples=80, deadline=None)
@given(S=samples)
def test_structured_consistency_matches_index_scan(base, S):
    top = max(x for x, _ in S) + 2
    scan = range(1 << (top + 2)) if base is Base.FIN else range(3 * top * top + 3)
    seen = any(all(decode_hypothesis(base, i)(x) == y for x, y in S) for i in scan)
    assert (consistent(ClassSpec(base), S) is Consistency.YES) == seen


def test_erm_examples():
    assert erm(THD, ((1, 1), (3, 0))) == Threshold(2)
    assert erm(ClassSpec(Base.THD, Explicit([0])), ((1, 1),)) == Threshold(0)
    assert erm(ClassSpec(Base.THD_OMEGA), ((4, 1), (7, 1))) == Threshold(OMEGA)
    assert erm(IVL, ((1, 0), (2, 1), (3, 0))) == Interval(1, 3)
    with pytest.raises(NoHypothesisFound):
        erm(ClassSpec(Base.THD, Explicit([])), ((1, 1),))


def breakpoint_bounded(base, top):
    """Every hypothesis of ``base`` with breakpoint at most ``top``."""
    if base is Base.THD:
        return [Threshold(t) for t in range(top + 1)]
    if base is Base.THD_OMEGA:
        return [Threshold(OMEGA)] + [Threshold(t) for t in range(top + 1)]
    if base is Base.IVL:
        return [Interval(lo, hi) for hi in range(1, top + 1) for lo in range(hi)]
    return [decode_hypothesis(Base.FIN, i) for i in range(1 << (top + 1))]


@pytest.mark.parametrize("base", [Base.THD, Base.THD_OMEGA, Base.IVL, Base.FIN])
@settings(max_examples=60, deadline=None)
@given(S=samples)
def test_erm_is_optimal(base, S):
    top = max(x for x, _ in S) + 2
    i, h = erm_indexed(ClassSpec(base), S)
    assert decode_hypothesis(base, i) == h
    assert empirical_error(h, S) == min_empirical_error(breakpoint_bounded(base, top), S)


@settings(max_examples=60, deadline=None)
@given(S=samples, idx=st.sets(st.integers(0, 30), min_size=1, max_size=8))
def test_erm_on_explicit_lists_picks_smallest_optimal_index(S, idx):
    spec = ClassSpec(Base.IVL, Explicit(sorted(idx)))
    i, h = erm_indexed(spec, S)
    errs = {j: empirical_error(decode_hypothesis(Base.IVL, j), S) for j in idx}
    best = min(errs.values())
    assert errs[i] == best
    assert i == min(j for j, e in errs.items() if e == best)


def test_erm_on_enumerated_class_needs_answers():
    evens = ClassSpec(Base.THD, Enumerable(encode(EVENS)))
    assert erm(evens, ((1, 1), (2, 0)), cutoff=6) == Threshold(2)
    with pytest.raises(UnknownAtCutoff):
        erm(evens, ((2, 1), (3, 0)), cutoff=6)


def test_sample_complexity_pin_and_monotone():
    assert sample_complexity(1, 2, 2) == 2337
    for d, a, b in itertools.product(range(0, 10), range(1, 11), range(1, 11)):
        m = sample_complexity(d, a, b)
        assert m <= sample_complexity(d, a + 1, b)
        assert m <= sample_complexity(d, a, b + 1)
        assert m <= sample_complexity(d + 1, a, b)


def test_scpac_learner():
    A = scpac_learner(THD)
    assert A(((1, 1), (3, 0))) == Threshold(2)
    assert A.sample_complexity(2, 2) == sample_complexity(1, 2, 2)
    two = ClassSpec(Base.THD, Explicit([1, 4]))
    assert scpac_learner(two).sample_complexity(2, 2) == sample_complexity(1, 2, 2)
    with pytest.raises(InfiniteVC):
        scpac_learner(ClassSpec(Base.FIN))


@settings(max_examples=60, deadline=None)
@given(S=samples, idx=st.sets(st.integers(0, 20), min_size=1, max_size=6))
def test_scpac_learner_is_proper(S, idx):
    spec = ClassSpec(Base.THD_OMEGA, Explicit(sorted(idx)))
    h = scpac_learner(spec)(S)
    assert h in [decode_hypothesis(Base.THD_OMEGA, i) for i in idx]


def test_sample_space_weights():
    D = FiniteDistribution(((0, 1, Fraction(1, 3)), (1, 0, Fraction(2, 3))))
    ordered = list(sample_space(D, 3))
    multisets = list(sample_space(D, 3, ordered=False))
    assert len(ordered) == 8 and len(multisets) == 4
    assert sum(w for _, w in ordered) == sum(w for _, w in multisets) == 1
    assert dict(multisets)[((0, 1), (1, 0), (1, 0))] == 3 * Fraction(1, 3) * Fraction(4, 9)
    with pytest.raises(EnumerationBudgetExceeded):
        list(sample_space(D, 3, budget=7))


# The 16-row table: D uniform on {(0,1), (1,0)}, m = 4.  ERM over THD returns
# Threshold(1) (true error 0) whenever (0,1) was drawn, and Threshold(0)
# (true error 1/2) on the single all-(1,0) sequence.
SIXTEEN = FiniteDistribution.uniform([(0, 1), (1, 0)])


def hand_table():
    rows = []
    for seq in itertools.product([(0, 1), (1, 0)], repeat=4):
        risk = Fraction(0) if (0, 1) in seq else HALF
        rows.append((seq, risk))
    return rows


def test_sixteen_row_instance():
    rows = hand_table()
    assert len(rows) == 16
    A = erm_learner(THD)
    for seq, risk in rows:
        assert true_error(A(seq), SIXTEEN) == risk
    # a = 2: failure needs risk > 1/2, which never happens
    r = pac_verify_exact(A, THD, SIXTEEN, 4, 2, 2, ordered=True)
    assert (r.p, r.satisfied, r.samples) == (0, True, 16)
    # a = 3: failure is risk > 1/3, only the all-(1,0) row
    r = pac_verify_exact(A, THD, SIXTEEN, 4, 3, 2, ordered=True)
    assert r.p == Fraction(sum(risk > Fraction(1, 3) for _, risk in rows), 16) == Fraction(1, 16)
    assert pac_verify_exact(A, THD, SIXTEEN, 4, 3, 2).p == Fraction(1, 16)


def test_pac_trivial_cases():
    point = FiniteDistribution.uniform([(2, 1)])
    r = pac_verify_exact(erm_learner(THD), THD, point, 3, 2, 2)
    assert r.p == 0 and r.satisfied and r.total_weight == 1
    wrong = FiniteDistribution.uniform([(0, 1), (1, 1)])
    r = pac_verify_exact(constant_learner(0), THD, wrong, 2, 2, 2)
    assert r.p == 1 and not r.satisfied
    assert pac_verify_mc(erm_learner(THD), THD, point, 3, 2, 2, 500, seed=1).p_hat == 0
    assert pac_verify_mc(constant_learner(0), THD, wrong, 2, 2, 2, 500, seed=1).p_hat == 1


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 1)), min_size=1, max_size=4, unique=True),
       st.integers(1, 3), st.integers(1, 4), st.data())
def test_exact_matches_ordered_oracle(support, m, a, data):
    raw = data.draw(st.lists(st.integers(1, 4), min_size=len(support), max_size=len(support)))
    total = sum(raw)
    atoms = tuple((x, y, Fraction(w, total)) for (x, y), w in zip(support, raw))
    D = FiniteDistribution(atoms)
    A = erm_learner(IVL)
    r = pac_verify_exact(A, IVL, D, m, a, 2)
    bar = min_empirical_risk(D) + Fraction(1, a)
    assert r.p == ordered_failure_probability(A, atoms, m, bar)
    assert 0 <= r.p <= 1


def min_empirical_risk(D):
    return min(true_error(h, D) for h in breakpoint_bounded(Base.IVL, 6))


def test_mc_agrees_with_exact():
    A = erm_learner(THD)
    r = pac_verify_exact(A, THD, SIXTEEN, 4, 3, 2)
    mc = pac_verify_mc(A, THD, SIXTEEN, 4, 3, 2, trials=20000, seed=7)
    assert abs(float(mc.p_hat - r.p)) <= 4 * (float(r.p * (1 - r.p)) / 20000) ** 0.5
    assert mc == pac_verify_mc(A, THD, SIXTEEN, 4, 3, 2, trials=20000, seed=7)


def test_learner_cache_is_order_insensitive_only_when_declared():
    calls = []
    A = erm_learner(THD)
    A.fn = lambda S: calls.append(S) or Threshold(0)
    A(((1, 0), (2, 1)))
    A(((2, 1), (1, 0)))
    assert len(calls) == 1
    rng = random.Random(0)
    B = constant_learner(1).with_sample_complexity(lambda a, b: a * b)
    assert B.sample_complexity(3, 4) == 12 and B(((rng.randrange(9), 1),)) == Threshold(OMEGA)
