import itertools
import random

import pytest

from starcqa import (
    TupleStatus,
    Tup,
    build_star_table,
    classify,
    confl_min,
    cons_tuples_over,
    m_chase_star,
)
from starcqa.bruteforce import TruthTable
from starcqa.errors import EnumerationTooLarge
from starcqa.gen import random_warehouse
from starcqa.model import enumerate_tuples

from conftest import fig1_warehouse


def all_tuples_over(adom, attrs):
    out = []
    names = sorted(attrs)
    for combo in itertools.product(*(adom[a] for a in names)):
        out.append(Tup(zip(names, combo)))
    return out


def example2_partition(example2_chase):
    adom = {"A": ("a",), "B": ("b",), "C": ("c", "c'")}
    universe = ("A", "B", "C")
    buckets = {s: set() for s in TupleStatus}
    for r in range(1, 4):
        for attrs in itertools.combinations(universe, r):
            for t in all_tuples_over(adom, attrs):
                buckets[classify(example2_chase, t)].add(t)
    return buckets


def test_example2_true_confl_cons_sets(example2_chase):
    buckets = example2_partition(example2_chase)
    T = lambda **kw: Tup(kw)
    true_set = buckets[TupleStatus.TRUE_CONSISTENT] | buckets[TupleStatus.TRUE_CONFLICTING]
    assert true_set == {
        T(A="a", B="b", C="c"), T(A="a", B="b", C="c'"),
        T(A="a", B="b"), T(A="a", C="c"), T(A="a", C="c'"),
        T(B="b", C="c"), T(B="b", C="c'"),
        T(A="a"), T(B="b"), T(C="c"), T(C="c'"),
    }
    assert buckets[TupleStatus.TRUE_CONFLICTING] == {
        T(A="a", B="b", C="c"), T(A="a", B="b", C="c'"),
        T(A="a", C="c"), T(A="a", C="c'"), T(B="b", C="c"), T(B="b", C="c'"),
    }
    assert buckets[TupleStatus.TRUE_CONSISTENT] == {
        T(A="a", B="b"), T(A="a"), T(B="b"), T(C="c"), T(C="c'"),
    }
    assert buckets[TupleStatus.FALSE] == set()  # no false tuples in this example


def test_classify_example2_cases(example2_chase):
    assert classify(example2_chase, Tup({"A": "a", "B": "b"})) is TupleStatus.TRUE_CONSISTENT
    assert classify(example2_chase, Tup({"A": "a", "C": "c"})) is TupleStatus.TRUE_CONFLICTING
    assert classify(example2_chase, Tup({"A": "a", "B": "b", "C": "zz"})) is TupleStatus.FALSE


def test_classify_fig2_cases(fig1_chase):
    t = Tup({"K1": "k'1", "K2": "k''2", "A1_1": "a1", "M1": "m1"})
    assert classify(fig1_chase, t) is TupleStatus.TRUE_CONSISTENT
    assert classify(fig1_chase, Tup({"K1": "k1", "A1_1": "a1"})) is TupleStatus.TRUE_CONFLICTING
    assert classify(fig1_chase, Tup({"K1": "k1", "K2": "k'2", "M1": "m'1"})) is TupleStatus.TRUE_CONFLICTING
    assert classify(fig1_chase, Tup({"A1_1": "a1"})) is TupleStatus.TRUE_CONSISTENT


def test_confl_min_example2(example2_chase):
    assert confl_min(example2_chase) == {
        Tup({"A": "a", "C": "c"}), Tup({"A": "a", "C": "c'"}),
        Tup({"B": "b", "C": "c"}), Tup({"B": "b", "C": "c'"}),
    }


def test_confl_min_fig2(fig1_chase):
    assert confl_min(fig1_chase) == {
        Tup({"K1": "k1", "A1_1": "a1"}),
        Tup({"K1": "k1", "A1_1": "a'1"}),
        Tup({"K1": "k1", "K2": "k'2", "M1": "m'1"}),
        Tup({"K1": "k1", "K2": "k'2", "M1": "m''1"}),
    }


def test_confl_min_empty_for_satisfying_warehouse():
    w = fig1_warehouse()
    w2 = type(w)(w.schema, [w.dim_tables[0][:1], w.dim_tables[1]], w.fact_table[:1])
    assert confl_min(m_chase_star(w2)) == frozenset()


def test_confl_min_members_are_minimal(fig1_chase):
    for t in confl_min(fig1_chase):
        assert classify(fig1_chase, t) is TupleStatus.TRUE_CONFLICTING
        for a in t.schema:
            rest = t.schema - {a}
            if rest:
                assert classify(fig1_chase, t.restrict(rest)) is not TupleStatus.TRUE_CONFLICTING


def test_conflicting_iff_super_tuple_of_confl_min(fig1_chase):
    cm = confl_min(fig1_chase)
    for sigma in fig1_chase:
        for t in enumerate_tuples(sigma):
            status = classify(fig1_chase, t)
            has_min_sub = any(c.schema <= t.schema and all(t[a] == c[a] for a in c.schema) for c in cm)
            assert (status is TupleStatus.TRUE_CONFLICTING) == has_min_sub


def test_cons_tuples_over_examples(fig1_chase, example2_chase):
    assert cons_tuples_over(fig1_chase, {"K1", "A1_2"}) == {
        Tup({"K1": "k1", "A1_2": "a2"}), Tup({"K1": "k''1", "A1_2": "a'2"}),
    }
    assert cons_tuples_over(example2_chase, {"A", "B"}) == {Tup({"A": "a", "B": "b"})}
    assert cons_tuples_over(fig1_chase, frozenset()) == {Tup()}


def test_cons_tuples_over_cap(fig1_chase):
    with pytest.raises(EnumerationTooLarge):
        cons_tuples_over(fig1_chase, {"A1_1"}, cap=1)


def test_sub_tuple_closure(fig1_chase):
    # every sub-tuple of a true tuple is true; of a consistent one, consistent
    for sigma in fig1_chase:
        for t in enumerate_tuples(sigma):
            status = classify(fig1_chase, t)
            for r in range(1, len(t)):
                for attrs in itertools.combinations(t.schema, r):
                    sub = classify(fig1_chase, t.restrict(attrs))
                    assert sub is not TupleStatus.FALSE
                    if status is TupleStatus.TRUE_CONSISTENT:
                        assert sub is TupleStatus.TRUE_CONSISTENT


def test_super_tuple_conflict_closure(fig1_chase):
    cm = confl_min(fig1_chase)
    for sigma in fig1_chase:
        for t in enumerate_tuples(sigma):
            for c in cm:
                if c.schema <= t.schema and all(t[a] == c[a] for a in c.schema):
                    assert classify(fig1_chase, t) is TupleStatus.TRUE_CONFLICTING


def test_projection_homogeneity(fig1_chase):
    for sigma in fig1_chase:
        schema = sorted(sigma.schema)
        for r in range(1, len(schema) + 1):
            for attrs in itertools.combinations(schema, r):
                statuses = {classify(fig1_chase, t) for t in enumerate_tuples(sigma, attrs)}
                assert len(statuses) == 1


@pytest.mark.parametrize("measure_fds", [True, False])
def test_classify_agrees_with_bruteforce(measure_fds):
    # oracle equivalence on small warehouses: classify vs FD saturation
    rng = random.Random(5 if measure_fds else 6)
    checked = 0
    for _ in range(40):
        w = random_warehouse(rng, max_dims=2, max_non_keys=2, max_measures=1,
                             max_rows=4, measure_fds=measure_fds)
        if w.size > 12:
            continue
        res = m_chase_star(w)
        tt = TruthTable(build_star_table(w).rows, res.fds)
        for sigma in res:
            for t in enumerate_tuples(sigma):
                for r in range(1, len(t) + 1):
                    for attrs in itertools.combinations(t.schema, r):
                        sub = t.restrict(attrs)
                        status = classify(res, sub)
                        assert tt.is_true(sub) == (status is not TupleStatus.FALSE)
                        if status is not TupleStatus.FALSE:
                            assert tt.is_conflicting(sub) == (status is TupleStatus.TRUE_CONFLICTING)
                        checked += 1
        # sample some false tuples too
        for _ in range(10):
            attrs = rng.sample(list(res.universe), k=rng.randint(1, 3))
            t = Tup({a: rng.choice(res.adom[a]) for a in attrs if res.adom.get(a)})
            if len(t):
                assert (classify(res, t) is not TupleStatus.FALSE) == tt.is_true(t)
    assert checked > 500
