import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lhvbounds.errors import CapExceeded, ValidationError
from lhvbounds.forms import (distinct_face_count, evaluate_correlation_form,
                             evaluate_correlation_points,
                             evaluate_event_objective,
                             evaluate_probability_form, face_count,
                             lemma1_audit, lhv_bounds, lhv_bounds_correlation,
                             lhv_bounds_events, lhv_bounds_full_correlation,
                             lhv_bounds_probability, vertex_points,
                             vertex_values, xi_points)
from lhvbounds.generators import (ch, chsh, collins_gisin_2233,
                                  collins_gisin_4422, mk_coefficients,
                                  zohren_gill)
from lhvbounds.scenario import (CorrelationFunctional, EventFunctional,
                                EventTerm, IntervalExtremes,
                                ProbabilityFunctional, Scenario)

import oracles


def _same_extremes(a, b):
    return (a.min, a.max, a.argmin, a.argmax) == \
        (b.min, b.max, b.argmin, b.argmax)


def _same(a, b):
    """Reports equal apart from timing."""
    return (a.min, a.max, a.argmin, a.argmax, a.vertices_scanned) == \
        (b.min, b.max, b.argmin, b.argmax, b.vertices_scanned)


# ---------------------------------------------------------------------------
# point evaluation
# ---------------------------------------------------------------------------

def test_chsh_at_all_plus():
    assert evaluate_correlation_form(chsh().functional, [(1, 1), (1, 1)]) == 2


def test_empty_form_is_zero():
    f = CorrelationFunctional(Scenario.uniform((2, 3)), {})
    assert evaluate_correlation_form(f, [(1, -1), (0.3, 1, -1)]) == 0


def test_mk3_hand_value():
    f = mk_coefficients(3).functional
    assert evaluate_correlation_form(f, [(1, -1)] * 3) == -4


def test_dimension_mismatch():
    f = chsh().functional
    with pytest.raises(ValidationError):
        evaluate_correlation_form(f, [(1, 1)])
    with pytest.raises(ValidationError):
        evaluate_correlation_form(f, [(1, 1), (1, 1, 1)])


def test_point_lists_are_lexicographic():
    assert vertex_points(2).tolist() == [[-1, -1], [-1, 1], [1, -1], [1, 1]]
    assert xi_points(1, 2).tolist() == [[0, 0], [0, 1], [1, 0]]
    assert len(xi_points(2, 2)) == 9


# ---------------------------------------------------------------------------
# bounds: examples
# ---------------------------------------------------------------------------

def test_chsh_bounds():
    r = lhv_bounds_correlation(chsh().functional)
    assert (r.min, r.max) == (-2, 2)
    assert r.vertices_scanned == 16


def test_zero_functional_bounds():
    f = CorrelationFunctional(Scenario.uniform((2, 1)), {})
    r = lhv_bounds_correlation(f)
    assert (r.min, r.max) == (0, 0)
    assert r.argmax == ((1, 1), (1,))


def test_mk5_bound():
    assert lhv_bounds_correlation(mk_coefficients(5).functional).max == 16


@pytest.mark.parametrize("N", range(2, 9))
def test_mk_full_correlation(N):
    r = lhv_bounds_full_correlation(mk_coefficients(N).functional)
    assert r.max == 2 ** (N - 1) and r.min == -2 ** (N - 1)


@pytest.mark.parametrize("c", [3.0, -2.5, 0.125])
def test_single_full_term(c):
    f = CorrelationFunctional(Scenario.uniform((2, 3, 1)),
                              {((0, 1), (1, 2), (2, 0)): c})
    r = lhv_bounds_full_correlation(f)
    assert r.max == abs(c) and r.min == -abs(c)


def test_full_correlation_rejects_partial_terms():
    f = CorrelationFunctional(Scenario.uniform((2, 2)), {((0, 0),): 1.0})
    with pytest.raises(ValidationError):
        lhv_bounds_full_correlation(f)


def test_unnormalized_scenario_rejected():
    f = CorrelationFunctional(Scenario.uniform((1,), values=(0, 1)),
                              {((0, 0),): 1.0})
    with pytest.raises(ValidationError):
        lhv_bounds_correlation(f)


def test_interval_scenario_allowed():
    sc = Scenario((1, 1), ((IntervalExtremes(-1.0, 1.0),),) * 2)
    f = CorrelationFunctional(sc, {((0, 0), (1, 0)): 1.0, ((0, 0),): 1.0})
    r = lhv_bounds_correlation(f)
    assert (r.min, r.max) == (-2, 2)


def test_cg4422_bounds_and_witness():
    f = collins_gisin_4422().functional
    r = lhv_bounds_probability(f)
    assert r.max == 0
    assert evaluate_probability_form(f, [(1, 1, 1, 1), (1, 1, 1, 1)]) == 0
    # lower bound is not a reference value; frozen from the brute-force
    # enumeration over all 2^8 assignments
    assert r.min == -6


def test_cg2233_bounds_and_witness():
    f = collins_gisin_2233().functional
    r = lhv_bounds_probability(f)
    assert r.max == 0
    assert evaluate_probability_form(f, [(1, 0, 0, 1), (1, 0, 0, 0)]) == 0
    assert evaluate_probability_form(f, [(0,) * 4, (0,) * 4]) == 0
    assert r.min == -2


def test_ch_bounds():
    f = ch().functional
    r = lhv_bounds_probability(f)
    assert (r.min, r.max) == (-1, 0)
    assert evaluate_probability_form(f, [(1, 1), (1, 1)]) == 0


@pytest.mark.parametrize("K", [2, 8])
def test_zohren_gill_inf(K):
    assert lhv_bounds_events(zohren_gill(K).functional).min == 1


def test_full_grid_event():
    sc = Scenario.uniform((2, 1), values=(0, 1, 2))
    grid = frozenset(product(range(3), range(3)))
    f = EventFunctional(sc, (EventTerm((1, 0), grid, 1.0),))
    r = lhv_bounds_events(f)
    assert (r.min, r.max) == (1, 1)


def test_event_objective_matches_enumeration():
    f = zohren_gill(3).functional
    r = lhv_bounds_events(f)
    assert evaluate_event_objective(f, r.argmax) == r.max
    assert evaluate_event_objective(f, r.argmin) == r.min


def test_empty_probability_and_event():
    sc = Scenario.uniform((2, 2))
    events = {(n, s, 0): frozenset({1}) for n in range(2) for s in range(2)}
    r = lhv_bounds_probability(ProbabilityFunctional(sc, (1, 1), events))
    assert (r.min, r.max) == (0, 0) and r.argmax == ((0, 0), (0, 0))
    r = lhv_bounds_events(EventFunctional(sc, ()))
    assert (r.min, r.max) == (0, 0) and r.argmax == ((0, 0), (0, 0))


def test_dispatch():
    assert lhv_bounds(chsh().functional).max == 2
    assert lhv_bounds(ch().functional).min == -1
    assert lhv_bounds(zohren_gill(2).functional).min == 1
    with pytest.raises(TypeError):
        lhv_bounds(object())


def test_bound_report_json_shape():
    d = lhv_bounds_events(zohren_gill(2).functional).to_dict(timing=False)
    assert set(d) == {"min", "max", "argmin", "argmax", "vertices_scanned",
                      "elapsed_ms"}
    assert d["elapsed_ms"] is None
    # event witnesses are 1-based outcome indices
    assert d["argmin"] == [[1, 1], [1, 1]]


# ---------------------------------------------------------------------------
# caps
# ---------------------------------------------------------------------------

def test_vertex_cap():
    f = CorrelationFunctional(Scenario.uniform((31,)), {((0, 0),): 1.0})
    with pytest.raises(CapExceeded) as e:
        lhv_bounds_correlation(f)
    assert e.value.count == 2 ** 31 and "--cap" in str(e.value)
    with pytest.raises(CapExceeded):
        lhv_bounds_correlation(chsh().functional, cap=15)


def test_grid_and_xi_caps():
    with pytest.raises(CapExceeded) as e:
        lhv_bounds_events(zohren_gill(4).functional, cap=255)
    assert e.value.count == 256
    with pytest.raises(CapExceeded):
        lhv_bounds_probability(collins_gisin_4422().functional, cap=255)


# ---------------------------------------------------------------------------
# face counts
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("d,l,expected", [(4, 0, 16), (4, 1, 32), (5, 2, 160)])
def test_face_count_examples(d, l, expected):
    assert face_count(d, l) == expected


def test_face_count_against_enumeration():
    for d in range(1, 7):
        for l in range(d + 1):
            assert face_count(d, l) == oracles.face_count_by_enumeration(d, l)
            assert distinct_face_count(d, l) == \
                oracles.distinct_faces_by_enumeration(d, l)


def test_whole_cube_is_one_distinct_face():
    assert distinct_face_count(3, 3) == 1
    assert face_count(3, 3) == 6


def test_face_count_errors():
    for bad in [(0, 0), (3, 4), (3, -1)]:
        with pytest.raises(ValueError):
            face_count(*bad)
    with pytest.raises(TypeError):
        face_count(3.0, 1)
    with pytest.raises(OverflowError):
        face_count(30, 20, bits=64)
    assert face_count(200, 100) == math.factorial(200) // math.factorial(100) * 2 ** 100


# ---------------------------------------------------------------------------
# interior sampling audit
# ---------------------------------------------------------------------------

def test_audit_chsh():
    rec = lemma1_audit(chsh().functional, 100000, seed=7)
    assert rec.passed and rec.sampled_max <= 2 and rec.sampled_min >= -2
    assert rec.margin_max >= 0


def test_audit_zero():
    f = CorrelationFunctional(Scenario.uniform((2,)), {})
    rec = lemma1_audit(f, 1000, seed=1)
    assert rec.sampled_min == rec.sampled_max == 0


def test_audit_mk3():
    rec = lemma1_audit(mk_coefficients(3).functional, 100000, seed=3)
    assert rec.passed and -4 <= rec.sampled_min and rec.sampled_max < 4


def test_audit_reports_escape_for_wrong_bounds():
    from dataclasses import replace
    f = chsh().functional
    bogus = replace(lhv_bounds_correlation(f), max=1.0)
    rec = lemma1_audit(f, 2000, seed=0, bounds=bogus)
    assert not rec.passed and rec.escape["value"] > 1.0


def test_audit_is_seeded():
    f = mk_coefficients(3).functional
    a = lemma1_audit(f, 5000, seed=11)
    b = lemma1_audit(f, 5000, seed=11, batch=777)
    assert a == b


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------

@st.composite
def correlation_functionals(draw, max_parties=3, max_settings=3, full=False,
                            dyadic=True):
    N = draw(st.integers(1, max_parties))
    S = tuple(draw(st.integers(1, max_settings)) for _ in range(N))
    sc = Scenario.uniform(S)
    keys = []
    for mask in range(1, 2 ** N):
        sites = [n for n in range(N) if mask >> n & 1]
        if full and len(sites) != N:
            continue
        for sets in product(*(range(S[n]) for n in sites)):
            keys.append(tuple(zip(sites, sets)))
    chosen = draw(st.lists(st.sampled_from(keys), unique=True, max_size=12))
    if dyadic:
        coef = st.integers(-64, 64).map(lambda k: k / 8)
    else:
        coef = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
    return CorrelationFunctional(sc, {k: draw(coef) for k in chosen})


@given(correlation_functionals(full=True, dyadic=False))
@settings(max_examples=150, deadline=None)
def test_full_antisymmetry(f):
    r = lhv_bounds_full_correlation(f)
    vals = vertex_values(f)
    assert vals.max() == -vals.min()
    # witnesses follow the same tie rule as the unreduced enumeration
    assert _same_extremes(r, lhv_bounds_correlation(f))
    assert abs(r.max - vals.max()) <= 1e-12
    assert abs(r.min - vals.min()) <= 1e-12
    S = f.scenario.settings
    rng = np.random.default_rng(0)
    for _ in range(5):
        eta = [rng.choice([-1.0, 1.0], size=s) for s in S]
        n = int(rng.integers(len(S)))
        flipped = [(-e if i == n else e) for i, e in enumerate(eta)]
        assert evaluate_correlation_form(f, flipped) == \
            -evaluate_correlation_form(f, eta)


@given(correlation_functionals(dyadic=False), st.integers(0, 2 ** 32 - 1))
@settings(max_examples=100, deadline=None)
def test_vertex_dominance(f, seed):
    r = lhv_bounds_correlation(f)
    rng = np.random.default_rng(seed)
    etas = [rng.uniform(-1, 1, size=(500, S)) for S in f.scenario.settings]
    vals = evaluate_correlation_points(f, etas)
    assert vals.max() <= r.max + 1e-9 and vals.min() >= r.min - 1e-9


@given(correlation_functionals(), st.data())
@settings(max_examples=100, deadline=None)
def test_multilinear_in_each_coordinate(f, data):
    S = f.scenario.settings
    eta = [[data.draw(st.integers(-4, 4)) / 4 for _ in range(s)] for s in S]
    n = data.draw(st.integers(0, len(S) - 1))
    s = data.draw(st.integers(0, S[n] - 1))

    def at(t):
        e = [list(v) for v in eta]
        e[n][s] = t
        return evaluate_correlation_form(f, e)

    a, b = at(0.0), at(1.0) - at(0.0)
    for t in (-1.0, -0.5, 0.25, 0.75):
        assert at(t) == a + b * t


@given(correlation_functionals(dyadic=False))
@settings(max_examples=150, deadline=None)
def test_witnesses_reproduce_bounds_exactly(f):
    r = lhv_bounds_correlation(f)
    assert evaluate_correlation_form(f, r.argmax) == r.max
    assert evaluate_correlation_form(f, r.argmin) == r.min


@given(correlation_functionals(max_parties=4, max_settings=4))
@settings(max_examples=100, deadline=None)
def test_gray_naive_tensor_agree_exactly(f):
    assert sum(f.scenario.settings) <= 16
    t = vertex_values(f, "tensor")
    assert np.array_equal(t, vertex_values(f, "naive"))
    assert np.array_equal(t, vertex_values(f, "gray"))


@given(correlation_functionals(max_parties=3, max_settings=3))
@settings(max_examples=60, deadline=None)
def test_correlation_against_oracle(f):
    r = lhv_bounds_correlation(f)
    assert (r.min, r.max) == oracles.correlation_extremes(f.scenario.settings,
                                                          f.terms)


@given(correlation_functionals(dyadic=True))
@settings(max_examples=100, deadline=None)
def test_witness_is_lexicographically_first(f):
    if not f.terms:
        return  # empty map has the fixed all-(+1) witness
    r = lhv_bounds_correlation(f)
    vals = vertex_values(f, "naive")
    S = f.scenario.settings
    first_max = int(np.flatnonzero(vals >= vals.max() - 1e-12)[0])
    first_min = int(np.flatnonzero(vals <= vals.min() + 1e-12)[0])
    flat = tuple(x for site in r.argmax for x in site)
    bits = [(first_max >> (sum(S) - 1 - i)) & 1 for i in range(sum(S))]
    assert flat == tuple(2 * b - 1 for b in bits)
    flat = tuple(x for site in r.argmin for x in site)
    bits = [(first_min >> (sum(S) - 1 - i)) & 1 for i in range(sum(S))]
    assert flat == tuple(2 * b - 1 for b in bits)


@given(correlation_functionals(max_parties=3, max_settings=4),
       st.integers(1, 64), st.integers(1, 4))
@settings(max_examples=80, deadline=None)
def test_partition_independence(f, chunk, threads):
    base = lhv_bounds_correlation(f)
    other = lhv_bounds_correlation(f, threads=threads, chunk=chunk)
    assert _same(base, other)
    if f.is_full and f.terms:
        assert _same(lhv_bounds_full_correlation(f),
                     lhv_bounds_full_correlation(f, threads=threads,
                                                 chunk=chunk))


@given(correlation_functionals(max_parties=2, max_settings=3),
       correlation_functionals(max_parties=2, max_settings=3))
@settings(max_examples=80, deadline=None)
def test_subadditivity(f, g):
    if f.scenario != g.scenario:
        g = CorrelationFunctional(f.scenario, {
            k: v for k, v in g.terms.items()
            if all(n < f.scenario.num_parties and s < f.scenario.settings[n]
                   for n, s in k)})
    rf, rg, rs = (lhv_bounds_correlation(x) for x in (f, g, f + g))
    assert rs.max <= rf.max + rg.max
    assert rs.min >= rf.min + rg.min


@st.composite
def probability_functionals(draw):
    N = draw(st.integers(1, 3))
    S = tuple(draw(st.integers(1, 3)) for _ in range(N))
    Q = tuple(draw(st.integers(1, 3)) for _ in range(N))
    if math.prod((q + 1) ** s for s, q in zip(S, Q)) > 5000:
        S = tuple(min(s, 2) for s in S)
        Q = tuple(min(q, 2) for q in Q)
    sc = Scenario.uniform(S, values=tuple(range(max(Q) + 1)))
    events = {(n, s, q): frozenset({q}) for n in range(N)
              for s in range(S[n]) for q in range(Q[n])}
    keys = []
    for mask in range(1, 2 ** N):
        sites = [n for n in range(N) if mask >> n & 1]
        for combo in product(*(product(range(S[n]), range(Q[n]))
                               for n in sites)):
            keys.append(tuple((n, s, q) for n, (s, q) in zip(sites, combo)))
    chosen = draw(st.lists(st.sampled_from(keys), unique=True, min_size=1,
                           max_size=10))
    coef = st.integers(-16, 16).map(lambda k: k / 4)
    return ProbabilityFunctional(sc, Q, events,
                                 {k: draw(coef) for k in chosen})


@given(probability_functionals(), st.integers(1, 40))
@settings(max_examples=60, deadline=None)
def test_probability_against_oracle(f, chunk):
    r = lhv_bounds_probability(f, chunk=chunk, threads=2)
    lo, hi = oracles.probability_extremes(f.scenario.settings, f.blocks,
                                          f.terms)
    assert (r.min, r.max) == (lo, hi)
    assert evaluate_probability_form(f, r.argmax) == r.max
    assert evaluate_probability_form(f, r.argmin) == r.min
    for site, S, Q in zip(r.argmax, f.scenario.settings, f.blocks):
        assert all(sum(site[s * Q:(s + 1) * Q]) <= 1 for s in range(S))


@st.composite
def event_functionals(draw):
    N = draw(st.integers(1, 3))
    S = tuple(draw(st.integers(1, 2)) for _ in range(N))
    K = draw(st.integers(2, 3))
    sc = Scenario.uniform(S, values=tuple(range(K)))
    terms = []
    for _ in range(draw(st.integers(1, 4))):
        sets = tuple(draw(st.integers(0, s - 1)) for s in S)
        grid = list(product(range(K), repeat=N))
        ev = draw(st.lists(st.sampled_from(grid), unique=True, max_size=6))
        terms.append(EventTerm(sets, frozenset(ev),
                               draw(st.integers(-8, 8)) / 2))
    return EventFunctional(sc, tuple(terms))


@given(event_functionals(), st.integers(1, 30))
@settings(max_examples=60, deadline=None)
def test_events_against_oracle(f, chunk):
    r = lhv_bounds_events(f, chunk=chunk, threads=2)
    lo, hi = oracles.event_extremes(
        f.scenario.outcome_counts(),
        [(t.settings, t.outcomes, t.gamma) for t in f.terms])
    assert (r.min, r.max) == (lo, hi)
    assert evaluate_event_objective(f, r.argmax) == r.max
    assert evaluate_event_objective(f, r.argmin) == r.min


def test_large_scan_thread_independence():
    rng = np.random.default_rng(5)
    sc = Scenario.uniform((7, 7, 6))
    terms = {}
    for _ in range(50):
        n = sorted(rng.choice(3, size=int(rng.integers(1, 4)), replace=False))
        key = tuple((int(i), int(rng.integers(0, sc.settings[i]))) for i in n)
        terms[key] = float(rng.integers(-3, 4))
    f = CorrelationFunctional(sc, terms)
    base = lhv_bounds_correlation(f, threads=1)
    assert base.vertices_scanned == 2 ** 20
    for threads, chunk in [(2, 1 << 18), (8, 1 << 18), (3, 1 << 12)]:
        assert _same(base, lhv_bounds_correlation(f, threads=threads,
                                                  chunk=chunk))
