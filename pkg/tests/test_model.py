import itertools
import random

import pytest

from starcqa import (
    MTuple,
    Tup,
    build_star_table,
    enumerate_tuples,
    m_union,
    restrict,
    subsumes,
    validate_warehouse,
)
from starcqa.errors import AttributeNotDefined

from conftest import fig1_warehouse


def test_restrict_projection():
    t = Tup({"K1": "k1", "K2": "k2", "A1_1": "a1"})
    assert restrict(t, {"K1", "K2"}) == Tup({"K1": "k1", "K2": "k2"})


def test_restrict_sub_tuple_of_true_tuple():
    abc = Tup({"A": "a", "B": "b", "C": "c"})
    assert restrict(abc, {"A", "C"}) == Tup({"A": "a", "C": "c"})


def test_restrict_identity():
    t = Tup({"A": "a", "B": "b"})
    assert restrict(t, t.schema) == t


def test_restrict_undefined_attribute():
    with pytest.raises(AttributeNotDefined):
        restrict(Tup({"A": "a"}), {"A", "B"})


def test_subsumes_paper_example():
    big = MTuple({"A": ("a", "a'"), "B": ("b",)})
    assert subsumes(big, Tup({"A": "a"}))
    assert subsumes(big, MTuple({"A": ("a",)}))


def test_subsumes_schema_not_contained():
    small = MTuple({"A": ("a",)})
    assert not subsumes(small, MTuple({"A": ("a",), "B": ("b",)}))


def test_subsumes_reflexive():
    s = MTuple({"A": ("a", "a'"), "B": ("b",)})
    assert subsumes(s, s)


def test_m_union_absorbs_subsumed():
    s = MTuple({"A": ("a", "a'"), "B": ("b",)})
    sp = MTuple({"A": ("a",)})
    assert m_union(s, sp) == s


def test_m_union_paper_example():
    s = MTuple({"A": ("a", "a'"), "B": ("b",)})
    spp = MTuple({"A": ("a",), "B": ("b", "b'"), "C": ("c",)})
    assert m_union(s, spp) == MTuple({"A": ("a", "a'"), "B": ("b", "b'"), "C": ("c",)})


def test_m_union_idempotent():
    s = MTuple({"A": ("a", "a'"), "C": ("c",)})
    assert m_union(s, s) == s


def test_enumerate_tuples_cross_product():
    s = MTuple({"A": ("a",), "B": ("b",), "C": ("c", "c'")})
    got = enumerate_tuples(s, {"A", "B", "C"})
    assert got == {
        Tup({"A": "a", "B": "b", "C": "c"}),
        Tup({"A": "a", "B": "b", "C": "c'"}),
    }


def test_enumerate_tuples_single_key():
    s = MTuple({"K1": ("k1",), "A1_1": ("a1", "a'1")})
    assert enumerate_tuples(s, {"K1"}) == {Tup({"K1": "k1"})}


def test_enumerate_tuples_empty_schema():
    s = MTuple({"A": ("a",)})
    assert enumerate_tuples(s, frozenset()) == {Tup()}


def test_enumerate_tuples_cardinality_property():
    rng = random.Random(0)
    values = ["v0", "v1", "v2"]
    for _ in range(50):
        comps = {
            f"A{i}": tuple(rng.sample(values, k=rng.randint(1, 3)))
            for i in range(rng.randint(1, 4))
        }
        s = MTuple(comps)
        expect = 1
        for vs in comps.values():
            expect *= len(set(vs))
        assert len(enumerate_tuples(s)) == expect == s.tuple_count()


def test_partial_order_properties():
    rng = random.Random(1)
    pool = ["x", "y", "z"]
    ms = [
        MTuple({a: tuple(rng.sample(pool, k=rng.randint(1, 3))) for a in rng.sample("ABC", k=rng.randint(1, 3))})
        for _ in range(30)
    ]
    for s in ms:
        assert subsumes(s, s)
    for s1, s2 in itertools.product(ms, repeat=2):
        if subsumes(s1, s2) and subsumes(s2, s1):
            assert s1 == s2  # antisymmetry on canonical forms
        assert subsumes(m_union(s1, s2), s1)  # s1 ⊑ s1 ⊔ s2
    for s1, s2, s3 in itertools.product(ms[:8], repeat=3):
        if subsumes(s2, s1) and subsumes(s3, s2):
            assert subsumes(s3, s1)  # transitivity
        assert m_union(m_union(s1, s2), s3) == m_union(s1, m_union(s2, s3))
        assert m_union(s1, s2) == m_union(s2, s1)


def test_validate_warehouse_fig1_ok(fig1):
    assert validate_warehouse(fig1) == []


def test_validate_warehouse_fact_without_measure():
    w = fig1_warehouse()
    bad = Tup({"K1": "k1", "K2": "k2"})
    w2 = type(w)(w.schema, w.dim_tables, w.fact_table + (bad,))
    violations = validate_warehouse(w2)
    assert any(v.restriction == "restriction-2" for v in violations)


def test_validate_warehouse_dimension_key_only():
    w = fig1_warehouse()
    bad = Tup({"K1": "k9"})
    w2 = type(w)(w.schema, [w.dim_tables[0] + (bad,), w.dim_tables[1]], w.fact_table)
    violations = validate_warehouse(w2)
    assert any(v.restriction == "restriction-1" for v in violations)


def test_validate_warehouse_type_mismatch():
    w = fig1_warehouse()
    bad = Tup({"K1": "k1", "A1_1": 7})
    w2 = type(w)(w.schema, [w.dim_tables[0] + (bad,), w.dim_tables[1]], w.fact_table)
    assert any(v.restriction == "type" for v in validate_warehouse(w2))


def test_build_star_table_row_count(fig1):
    t = build_star_table(fig1)
    assert len(t) == fig1.size == 10


def test_build_star_table_lossless(fig1):
    t = build_star_table(fig1)
    source = set()
    for _, rows in fig1.tables():
        source.update(rows)
    assert set(t.rows) == source
    for row in t.rows:
        assert restrict(row, row.schema) == row


def test_build_star_table_empty_fact():
    w = fig1_warehouse()
    w2 = type(w)(w.schema, w.dim_tables, [])
    assert len(build_star_table(w2)) == 6


def test_adom_cached(fig1):
    assert fig1.adom["A1_1"] == ("a'1", "a1")
    assert fig1.adom["M1"] == ("m''1", "m'1", "m1")
