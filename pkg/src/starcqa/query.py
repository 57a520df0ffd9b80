"""Exact and bounded consistent answers to projection-selection queries.

The exact path requires the selection condition to be independent; the
general membership test scans m-tuples and accepts a projected tuple
when some m-tuple covers the query schema, meets the condition, and has
single-valued components wherever a dependency lands inside the query
schema.  For an arbitrary condition only a lower and an upper bound are
computed, by one scan enumerating candidate tuples per m-tuple.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chase import ChaseResult
from .classify import cons_tuples_over
from .conditions import cond_schema, decompose_independent, eval_condition, sat_sets
from .errors import EnumerationTooLarge
from .model import Tup, enumerate_tuples

DEFAULT_ENUMERATION_CAP = 10**6


@dataclass(frozen=True)
class StandardQuery:
    projection: frozenset[str]
    condition: object | None = None

    @property
    def schema(self) -> frozenset[str]:
        return self.projection | cond_schema(self.condition)


@dataclass(frozen=True)
class BoundedAnswer:
    lower: frozenset[Tup]
    upper: frozenset[Tup]


def consistent_answer_standard(
    chase: ChaseResult, q: StandardQuery, force_general: bool = False
) -> frozenset[Tup]:
    """Exact consistent answer; raises NotIndependent for unsplittable conditions."""
    if q.condition is None:
        return cons_tuples_over(chase, q.projection)
    ic = decompose_independent(q.condition)
    sat = sat_sets(ic, chase)
    X = frozenset(q.projection)
    schq = q.schema
    schg = ic.schema
    fast = (
        not force_general
        and chase.schema is not None
        and chase.schema.key_set <= X
    )
    if fast:
        return _answer_key_projecting(chase, X, schq, schg, sat)
    return _answer_general(chase, X, schq, schg, sat)


def _answer_general(chase, X, schq, schg, sat) -> frozenset[Tup]:
    out: set[Tup] = set()
    overlap = X & schg
    for sigma in chase.m_tuples:
        if not schq <= sigma.schema:
            continue
        if any(not set(sigma.component(b)) & sat[b] for b in schg):
            continue
        ok = True
        for f in chase.fds:
            if not f.lhs | {f.rhs} <= schq:
                continue
            comp = sigma.component(f.rhs)
            if f.rhs in X and len(comp) > 1:
                ok = False
                break
            if f.rhs in schg and not set(comp) <= sat[f.rhs]:
                ok = False
                break
        if not ok:
            continue
        for x in enumerate_tuples(sigma, X):
            # condition atoms over projected attributes pin the value
            if all(x[b] in sat[b] for b in overlap):
                out.add(x)
    return frozenset(out)


def _answer_key_projecting(chase, X, schq, schg, sat) -> frozenset[Tup]:
    """Fast path for queries projecting the whole key set."""
    out: set[Tup] = set()
    for sigma in chase.m_tuples:
        if not schq <= sigma.schema:
            continue
        if any(len(sigma.component(a)) > 1 for a in X):
            continue
        if any(not set(sigma.component(b)) <= sat[b] for b in schg):
            continue
        out.add(Tup({a: sigma.component(a)[0] for a in X}))
    return frozenset(out)


def consistent_answer_bounds(
    chase: ChaseResult, q: StandardQuery, cap: int = DEFAULT_ENUMERATION_CAP
) -> BoundedAnswer:
    """Lower and upper bounds valid for any condition, by one m-table scan."""
    X = frozenset(q.projection)
    schq = q.schema
    schg = cond_schema(q.condition)
    lower: set[Tup] = set()
    upper: set[Tup] = set()
    budget = cap
    for sigma in chase.m_tuples:
        if not schq <= sigma.schema:
            continue
        pinned_q = [f for f in chase.fds if f.lhs | {f.rhs} <= schq]
        pinned_x = [f for f in pinned_q if f.lhs | {f.rhs} <= X]
        t_consistent = all(len(sigma.component(f.rhs)) == 1 for f in pinned_q)
        x_consistent = all(len(sigma.component(f.rhs)) == 1 for f in pinned_x)
        if not x_consistent:
            continue
        budget -= sigma.tuple_count(schq)
        if budget < 0:
            raise EnumerationTooLarge(f"bounds enumeration exceeds {cap} tuples")
        for t in enumerate_tuples(sigma, schq):
            if not eval_condition(q.condition, t):
                continue
            x = t.restrict(X)
            upper.add(x)
            if t_consistent:
                lower.add(x)
    return BoundedAnswer(frozenset(lower), frozenset(upper))
