"""Acceptance criteria, one test each.  ``pytest -v`` ends with a PASS/FAIL line per criterion."""

import itertools
import json
import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import pytest

from cpac.arith import FamilyRef, build_pac, build_scpac, build_vc_lt, classify, eval_bounded, sigma
from cpac.classes import OMEGA, Base, ClassSpec, Explicit, Threshold, decode_hypothesis, restrict
from cpac.constructions import (
    consistency_by_cases,
    extract_erm,
    fin_family,
    membership_from_consistency,
    nfl_adversary,
    rec_family,
)
from cpac.learn import (
    FiniteDistribution,
    constant_learner,
    empirical_error,
    erm,
    erm_learner,
    pac_verify_exact,
    pac_verify_mc,
)
from cpac.machine import Djz, Halt, Inc, Program, ce_stage, decode, encode, run_bounded, run_program, trace
from cpac.programs import ABOVE_2, ALL, BELOW_4, I_ID, I_LOOP, J_EVENS, J_FIN2, MULTIPLES_OF_3
from cpac.vc import INFINITE, shatters, vc_exact, vc_lower_bound

from oracles import ordered_failure_probability, reference_run, stage_value, threshold_consistent

DATA = Path(__file__).resolve().parent / "data"
THD = ClassSpec(Base.THD)
IVL = ClassSpec(Base.IVL)


@contextmanager
def within(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.2f}s, limit {seconds}s"


def frac(text):
    return Fraction(text)


# 1 ---------------------------------------------------------------------------

@pytest.mark.criterion(1, "VC pins")
def test_vc_pins():
    with within(1):
        assert vc_exact(IVL) == 2
        assert vc_exact(THD) == 1
        assert shatters(IVL, {1, 3})
        assert not shatters(IVL, {1, 3, 5})
        init = ClassSpec(Base.INIT)
        stages = range(65)
        # singletons that some stage labels 1; the rest never halt on themselves this early
        tested = [x for x in range(32) if run_bounded(x, x, 64) is not None]
        assert len(tested) >= 20
        for x in tested:
            assert shatters(init, {x}, cutoff=len(stages))
        for x, y in itertools.combinations(range(32), 2):
            assert not shatters(init, {x, y}, cutoff=len(stages))


# 2 ---------------------------------------------------------------------------

def _brute_classes():
    """Class -> every breakpoint-bounded member for points below 10, built without the package."""
    thd = [lambda x, t=t: int(x < t) for t in range(12)]
    ivl = [lambda x, lo=lo, hi=hi: int(lo < x < hi) for hi in range(1, 13) for lo in range(hi)]
    out = [
        (THD, thd),
        (ClassSpec(Base.THD_OMEGA), thd + [lambda x: 1]),
        (IVL, ivl),
    ]
    explicit = [
        (Base.THD, [2, 5, 7]),
        (Base.THD_OMEGA, [0, 4, 9]),
        (Base.IVL, list(range(0, 40, 3))),
        (Base.FIN, list(range(24))),
        (Base.INIT, [3, 10, 30]),
    ]
    for base, idx in explicit:
        out.append((ClassSpec(base, Explicit(idx)), [decode_hypothesis(base, i) for i in idx]))
    return out


@pytest.mark.criterion(2, "ERM oracle equivalence")
def test_erm_oracle_equivalence():
    classes = _brute_classes()
    with within(5):
        for seed in range(200):
            rng = random.Random(seed)
            n = rng.randint(1, 6)
            S = tuple((rng.randrange(10), rng.randrange(2)) for _ in range(n))
            for spec, hyps in classes:
                best = min(Fraction(sum(h(x) != y for x, y in S), n) for h in hyps)
                assert empirical_error(erm(spec, S), S) == best, (spec, S)


# 3 ---------------------------------------------------------------------------

RESTRICTED_THD = ClassSpec(Base.THD, Explicit(range(5)))  # every labeling THD gives {0..3}
GRID_POINTS = [(x, y) for x in range(4) for y in (0, 1)]


def quarter_grid():
    for w in itertools.product(range(5), repeat=len(GRID_POINTS)):
        if sum(w) == 4:
            yield tuple((x, y, Fraction(k, 4)) for (x, y), k in zip(GRID_POINTS, w) if k)


def certified_m():
    A = erm_learner(RESTRICTED_THD)
    cells = list(quarter_grid())
    for m in range(1, 13):
        checks = [pac_verify_exact(A, RESTRICTED_THD, FiniteDistribution(c), m, 2, 2) for c in cells]
        if all(c.satisfied for c in checks):
            return m, cells, checks
    return None, cells, None


@pytest.mark.criterion(3, "exact verification on the quarter grid")
def test_exact_verification_grid():
    pinned = json.loads((DATA / "threshold_grid.json").read_text())
    with within(60):
        m, cells, checks = certified_m()
    assert len(cells) == 330
    assert m == pinned["m"] == 1
    assert [[[x, y, str(w)] for x, y, w in c] for c in cells] == [
        [[x, y, str(frac(w))] for x, y, w in cell["atoms"]] for cell in pinned["cells"]]
    assert [c.p for c in checks] == [frac(cell["p"]) for cell in pinned["cells"]]

    # Hand count for D uniform on (0,1), (1,1), (2,1), (3,0), m = 1.  The best
    # threshold (t = 3) has risk 0, so failure means risk > 1/2.  Single draws:
    # (0,1) -> t=1, risk 1/2; (1,1) -> t=2, risk 1/4; (2,1) -> t=3, risk 0;
    # (3,0) -> t=0, risk 3/4.  Only the last fails: p = 1/4.
    hand = ((0, 1, Fraction(1, 4)), (1, 1, Fraction(1, 4)), (2, 1, Fraction(1, 4)), (3, 0, Fraction(1, 4)))
    assert checks[cells.index(hand)].p == Fraction(1, 4)

    # every cell again through the ordered-sample oracle
    A = erm_learner(RESTRICTED_THD)
    for cell, check in zip(cells, checks):
        bar = check.best_risk + Fraction(1, 2)
        assert ordered_failure_probability(A, cell, 1, bar) == check.p


# 4 ---------------------------------------------------------------------------

def small_samples():
    pts = list(itertools.product(range(4), (0, 1)))
    for n in (1, 2, 3):
        yield from itertools.product(pts, repeat=n)


@pytest.mark.criterion(4, "ERM extraction")
def test_erm_extraction():
    with within(120):
        m, _, _ = certified_m()
        A = erm_learner(RESTRICTED_THD).with_sample_complexity(m)
        samples = list(small_samples())
        assert len(samples) == 584
        for S in samples:
            r = extract_erm(A, S, mode="exact")
            assert empirical_error(r.hypothesis, S) == empirical_error(erm(RESTRICTED_THD, S), S), S
        mismatches = 0
        for seed in range(50):
            S = random.Random(seed).choice(samples)
            r = extract_erm(A, S, mode="randomized", b=2, k=20, seed=seed)
            mismatches += empirical_error(r.hypothesis, S) != empirical_error(erm(RESTRICTED_THD, S), S)
        assert mismatches == 0


# 5 ---------------------------------------------------------------------------

@pytest.mark.criterion(5, "no-free-lunch adversary")
def test_nfl_adversary():
    X = [0, 1, 2, 3]
    in_class = 0
    with within(10):
        for A in (constant_learner(0), constant_learner(1), erm_learner(THD)):
            r = nfl_adversary(A, 2, X)
            assert r.p >= Fraction(1, 7), A.name
            if r.labeling in restrict(THD, X):
                in_class += 1
                assert not pac_verify_exact(A, THD, r.distribution, 2, 8, 7).satisfied, A.name
    assert in_class >= 1  # constant-1 is beaten by the all-zero labeling, which THD realises


# 6 ---------------------------------------------------------------------------

DECIDABLE_SETS = {
    "evens": (J_EVENS, lambda t: t % 2 == 0),
    "multiples-of-3": (encode(MULTIPLES_OF_3), lambda t: t % 3 == 0),
    "below-4": (encode(BELOW_4), lambda t: t < 4),
    "all": (encode(ALL), lambda t: True),
    "above-2": (encode(ABOVE_2), lambda t: t > 2),
}


@pytest.mark.criterion(6, "reductions")
def test_reductions():
    with within(60):
        # FIN family over W = {2, 5}: three hypotheses once both elements appear
        first = next(s for s in range(2001) if len(fin_family(J_FIN2, s).membership.indices) == 3)
        for s in range(first, 2001, 97):
            assert len(fin_family(J_FIN2, s).membership.indices) == 3
        final = fin_family(J_FIN2, 2000)
        assert len(final.membership.indices) == 3
        assert vc_exact(final) is not INFINITE

        witness = None
        s = 1
        while s <= 4096 and witness is None:
            witness = vc_lower_bound(fin_family(I_ID, s), 3, 32)
            s *= 2
        assert witness is not None and len(witness) == 3

        samples = [S for n in (1, 2, 3) for S in itertools.product(itertools.product(range(6), (0, 1)), repeat=n)]
        for name, (j, member) in DECIDABLE_SETS.items():
            fam = rec_family(j, 200)
            truth = {t for t in range(8) if member(t)}
            for S in samples:
                assert consistency_by_cases(fam, S) == threshold_consistent(truth, S), (name, S)
            oracle = lambda S, fam=fam: consistency_by_cases(fam, S)  # noqa: E731
            assert [membership_from_consistency(oracle, t) for t in range(9)] == [member(t) for t in range(9)], name


# 7 ---------------------------------------------------------------------------

@pytest.mark.criterion(7, "arithmetization")
def test_arithmetization():
    with within(30):
        programs = [J_EVENS, J_FIN2, I_ID, I_LOOP, encode(ALL)]
        members = [FamilyRef(kind, j) for kind in ("fin", "rec") for j in programs]
        assert len(members) == 10
        for ref in members:
            assert classify(build_pac(ref)) == sigma(2)
            assert classify(build_scpac(ref)) == sigma(3)

        rng = random.Random(2024)
        bases = [Base.THD, Base.THD_OMEGA, Base.IVL, Base.FIN, Base.INIT]
        checked = 0
        for _ in range(200):
            base = rng.choice(bases)
            bound = rng.randint(1, 12)
            idx = sorted(rng.sample(range(16), rng.randint(0, 16)))
            cls = ClassSpec(base, Explicit(idx))
            seen = ClassSpec(base, Explicit([i for i in idx if i < bound]))
            for d in range(1, 5):
                expected = vc_lower_bound(seen, d, bound) is None
                assert eval_bounded(build_vc_lt(cls, d), bound) == expected, (base, idx, bound, d)
                checked += 1
        assert checked == 800


# 8 ---------------------------------------------------------------------------

def random_program(rng):
    n = rng.randint(1, 6)
    ins = []
    for _ in range(n):
        kind = rng.random()
        if kind < 0.4:
            ins.append(Inc(rng.randrange(3)))
        elif kind < 0.9:
            ins.append(Djz(rng.randrange(3), rng.randrange(n + 1)))
        else:
            ins.append(Halt())
    return Program(tuple(ins))


def as_tuples(program):
    out = []
    for ins in program.instructions:
        if isinstance(ins, Inc):
            out.append(("INC", ins.reg))
        elif isinstance(ins, Djz):
            out.append(("DJZ", ins.reg, ins.target))
        else:
            out.append(("HALT",))
    return out


def all_short_programs():
    yield Program(())
    for n in (1, 2):
        slot = [Inc(r) for r in range(3)] + [Halt()] + [Djz(r, a) for r in range(3) for a in range(n + 1)]
        for ins in itertools.product(slot, repeat=n):
            yield Program(ins)


@pytest.mark.criterion(8, "machine invariants")
def test_machine_invariants():
    rng = random.Random(8)
    with within(10):
        for _ in range(1000):
            P = random_program(rng)
            i = encode(P)
            x = rng.randrange(8)
            s = rng.randrange(60)
            s2 = s + rng.randrange(60)
            a, b = trace(i, x, s), trace(i, x, s2)
            if a.halted:
                assert (b.halted, b.value, b.steps) == (True, a.value, a.steps)
            assert a.steps <= b.steps
            v = run_bounded(i, x, s)
            if v is not None:
                assert run_bounded(i, x, s2) == v
            assert ce_stage(i, s) <= ce_stage(i, s2)
            assert v == stage_value(as_tuples(P), x, s)
            raw = run_program(P, x, s2)
            assert (raw.halted, raw.value, raw.steps) == reference_run(as_tuples(P), x, s2)
        count = 0
        for P in all_short_programs():
            assert decode(encode(P)) == P
            count += 1
        assert count == 1 + 10 + 13 * 13


# 9 ---------------------------------------------------------------------------

def _dist(*atoms):
    return FiniteDistribution(tuple((x, y, Fraction(w)) for x, y, w in atoms))


MC_INSTANCES = [
    # learner, class, distribution, m, a, b, exact p
    ("erm", THD, _dist((0, 1, "1/2"), (1, 0, "1/2")), 4, 3, 2, "1/16"),
    ("erm", THD, _dist((0, 1, "1/4"), (1, 1, "1/4"), (2, 1, "1/4"), (3, 0, "1/4")), 1, 2, 2, "1/4"),
    ("erm", THD, _dist((0, 1, "1/4"), (1, 1, "1/4"), (2, 1, "1/4"), (3, 0, "1/4")), 2, 2, 2, "1/16"),
    ("erm", THD, _dist((0, 1, "1/3"), (1, 1, "1/3"), (2, 0, "1/3")), 3, 4, 2, "8/27"),
    ("erm", IVL, _dist((1, 1, "1/5"), (2, 1, "1/5"), (3, 0, "2/5"), (4, 1, "1/5")), 3, 3, 2, "14/125"),
    ("erm", IVL, _dist((0, 0, "1/4"), (2, 1, "1/2"), (5, 0, "1/4")), 2, 4, 2, "1/4"),
    ("erm", ClassSpec(Base.THD_OMEGA), _dist((0, 1, "1/6"), (3, 1, "1/2"), (4, 0, "1/3")), 3, 3, 2, "13/108"),
    ("erm", THD, _dist((0, 1, "1/8"), (1, 1, "1/8"), (2, 1, "1/8"), (3, 1, "1/8"), (4, 0, "1/2")), 5, 3, 2,
     "3125/32768"),
    ("const0", THD, _dist((0, 1, "3/10"), (1, 0, "7/10")), 3, 5, 2, "1/1"),
    ("erm", THD, _dist((0, 1, "1/2"), (2, 0, "1/4"), (2, 1, "1/4")), 4, 3, 2, "11/256"),
]


@pytest.mark.criterion(9, "exact and Monte-Carlo agreement")
def test_exact_mc_agreement():
    trials = 10**5
    with within(60):
        for seed, (name, spec, D, m, a, b, pinned) in enumerate(MC_INSTANCES, start=1):
            A = erm_learner(spec) if name == "erm" else constant_learner(0)
            p = pac_verify_exact(A, spec, D, m, a, b).p
            assert p == Fraction(pinned)
            mc = pac_verify_mc(A, spec, D, m, a, b, trials, seed, None)
            assert mc.trials == trials
            tol = 4 * math.sqrt(p * (1 - p) / trials)
            assert abs(float(mc.p_hat - p)) <= tol, (seed, float(mc.p_hat), p)


def test_threshold_omega_is_only_in_the_omega_base():
    # guards the grid and instances above against a silent change of base decoding
    assert decode_hypothesis(Base.THD_OMEGA, 0) == Threshold(OMEGA)
    assert decode_hypothesis(Base.THD, 0) == Threshold(0)
