"""The m-chase: generic fixpoint algorithm and the star-table specialization.

Both entry points produce the same m-table for star warehouses; the
generic one additionally accepts arbitrary normalized acyclic FD sets
over arbitrary tables and exists for cross-validation, examples and
tests.  The star algorithm is the production path: it groups each table
by key, joins dimension components into fact m-tuples and appends
unmatched dimension entries, all in O(W log W).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

from .errors import InvalidWarehouse, NonStarFDs
from .model import (
    FD,
    MTuple,
    StarSchemaDef,
    StarTable,
    Warehouse,
    build_star_table,
    mtuple_sort_key,
    validate_warehouse,
)


@dataclass(frozen=True)
class ChaseStats:
    m_tuple_count: int
    delta: int  # maximal component cardinality
    warehouse_size: int  # W = sum of table sizes
    elapsed: float


@dataclass(frozen=True)
class ChaseIntermediates:
    """Per-dimension grouped tables and the pre-join fact m-table."""

    dim_grouped: dict[str, tuple[MTuple, ...]]
    fact_grouped: tuple[MTuple, ...]


class ChaseResult:
    """The chased m-table plus key indexes and stats.

    For star chases every key component is a singleton, and with
    ``measure_fds`` enabled no two m-tuples share a full key value, so
    ``index_by_k`` buckets hold exactly one m-tuple each.  Results of
    the generic algorithm on non-star input carry no schema or indexes.
    """

    def __init__(self, m_tuples, fds, universe, adom, stats, schema=None, intermediates=None):
        self.universe = tuple(universe)
        self.m_tuples = tuple(sorted(set(m_tuples), key=lambda s: mtuple_sort_key(s, self.universe)))
        self.fds = tuple(fds)
        self.adom = dict(adom)
        self.stats = stats
        self.schema: StarSchemaDef | None = schema
        self.intermediates = intermediates
        self.fact_anchored: tuple[MTuple, ...] = ()
        self.dim_orphans: dict[str, tuple[MTuple, ...]] = {}
        self.index_by_k: dict[tuple, tuple[MTuple, ...]] = {}
        self.index_by_ki: dict[str, dict[object, tuple[MTuple, ...]]] = {}
        if schema is not None:
            self._build_indexes(schema)

    def _build_indexes(self, schema: StarSchemaDef):
        keys = schema.key_attrs
        kset = schema.key_set
        anchored, orphans = [], {d.name: [] for d in schema.dimensions}
        by_k: dict[tuple, list[MTuple]] = {}
        by_ki: dict[str, dict[object, list[MTuple]]] = {d.name: {} for d in schema.dimensions}
        for sigma in self.m_tuples:
            if kset <= sigma.schema:
                anchored.append(sigma)
                kval = tuple(sigma.component(k)[0] for k in keys)
                by_k.setdefault(kval, []).append(sigma)
            else:
                for d in schema.dimensions:
                    if d.key in sigma:
                        orphans[d.name].append(sigma)
                        break
            for d in schema.dimensions:
                if d.key in sigma:
                    kv = sigma.component(d.key)[0]
                    by_ki[d.name].setdefault(kv, []).append(sigma)
        self.fact_anchored = tuple(anchored)
        self.dim_orphans = {n: tuple(v) for n, v in orphans.items()}
        self.index_by_k = {k: tuple(v) for k, v in by_k.items()}
        self.index_by_ki = {n: {k: tuple(v) for k, v in d.items()} for n, d in by_ki.items()}

    def __iter__(self):
        return iter(self.m_tuples)

    def __len__(self):
        return len(self.m_tuples)

    def as_set(self) -> frozenset[MTuple]:
        return frozenset(self.m_tuples)


def _delta(m_tuples) -> int:
    best = 0
    for sigma in m_tuples:
        for _, vs in sigma.items():
            if len(vs) > best:
                best = len(vs)
    return best


def _closure(attrs: frozenset, fds) -> frozenset:
    out = set(attrs)
    changed = True
    while changed:
        changed = False
        for f in fds:
            if f.lhs <= out and f.rhs not in out:
                out.add(f.rhs)
                changed = True
    return frozenset(out)


def validate_fds(fds) -> None:
    """Reject FD sets that are not normalized (FD1, FD2) or are cyclic."""
    fds = tuple(fds)
    for f in fds:
        if not f.lhs or f.rhs in f.lhs:
            raise NonStarFDs(f"dependency {f} violates FD1")
    for f in fds:
        for b in f.lhs:
            if f.rhs in _closure(f.lhs - {b}, fds):
                raise NonStarFDs(f"dependency {f} has a reducible left-hand side")
    for f in fds:
        for g in fds:
            if f.rhs in g.lhs and g.rhs in f.lhs:
                raise NonStarFDs(f"dependencies {f} and {g} form a cycle")


def _adom_of(rows) -> dict[str, tuple]:
    pools: dict[str, set] = {}
    for t in rows:
        for a, v in t.items():
            pools.setdefault(a, set()).add(v)
    return {a: tuple(sorted(vs)) for a, vs in pools.items()}


def _subsumed(c1: dict, c2: dict) -> bool:
    return all(a in c2 and vs <= c2[a] for a, vs in c1.items())


def _apply_rule(live, i, j, f) -> bool:
    """One m-chase rule application on live[i], live[j]; True if Σ changed.

    The rule also fires when the merged component is unchanged but one
    m-tuple subsumes the other: the redundant one is removed.
    """
    si, sj = live[i], live[j]
    if not (f.lhs <= si.keys() and f.lhs <= sj.keys()):
        return False
    if f.rhs not in si and f.rhs not in sj:
        return False
    if any(not (si[b] & sj[b]) for b in f.lhs):
        return False
    merged = si.get(f.rhs, frozenset()) | sj.get(f.rhs, frozenset())
    s1 = dict(si)
    s1[f.rhs] = merged
    s2 = dict(sj)
    s2[f.rhs] = merged
    if _subsumed(s1, s2):
        live[i], live[j] = None, s2
        return True
    if _subsumed(s2, s1):
        live[i], live[j] = s1, None
        return True
    if s1 == si and s2 == sj:
        return False
    live[i], live[j] = s1, s2
    return True


def m_chase_generic(table, fds, universe=None, schema=None) -> ChaseResult:
    """Fixpoint of the m-chase rule over an arbitrary table.

    ``table`` is a StarTable or an iterable of tuples.  For every
    X -> A and every pair of m-tuples whose X-components share a tuple,
    the A-components are merged and component-wise redundant m-tuples
    are removed; the result is independent of application order.
    """
    start = time.perf_counter()
    if isinstance(table, StarTable):
        rows = table.rows
        universe = table.universe if universe is None else universe
    else:
        rows = tuple(table)
    fds = tuple(fds)
    validate_fds(fds)
    if universe is None:
        attrs = set()
        for t in rows:
            attrs |= t.schema
        for f in fds:
            attrs |= f.lhs | {f.rhs}
        universe = tuple(sorted(attrs))

    # components as dicts attr -> frozenset of values; None marks removal
    live: list[dict | None] = []
    for t in set(rows):
        live.append({a: frozenset((v,)) for a, v in t.items()})
    _dedupe(live)

    changed = True
    while changed:
        changed = False
        for i in range(len(live)):
            for j in range(len(live)):
                if i == j or live[i] is None or live[j] is None:
                    continue
                for f in fds:
                    if live[i] is None or live[j] is None:
                        break
                    if _apply_rule(live, i, j, f):
                        changed = True
        if _dedupe(live):
            changed = True

    m_tuples = [MTuple(c) for c in live if c is not None]
    stats = ChaseStats(len(m_tuples), _delta(m_tuples), len(rows), time.perf_counter() - start)
    return ChaseResult(m_tuples, fds, universe, _adom_of(rows), stats, schema=schema)


def _dedupe(live) -> bool:
    seen = set()
    changed = False
    for i, c in enumerate(live):
        if c is None:
            continue
        key = tuple(sorted((a, tuple(sorted(vs))) for a, vs in c.items()))
        if key in seen:
            live[i] = None
            changed = True
        else:
            seen.add(key)
    return changed


def _group_dimension(dim, rows) -> dict:
    """Key value -> attr -> set of values."""
    grouped: dict = {}
    for t in sorted(rows, key=lambda t: t[dim.key]):
        comp = grouped.setdefault(t[dim.key], {})
        for a, v in t.items():
            comp.setdefault(a, set()).add(v)
    return grouped


def _fact_groups(schema: StarSchemaDef, rows):
    """Group fact rows into (key value, measure components) pairs.

    With measure FDs, one group per distinct full-key value.  Without
    them each distinct (key, measure-combination) yields its own group
    with singleton measures.
    """
    keys = schema.key_attrs
    if schema.measure_fds:
        grouped: dict = {}
        for t in rows:
            kval = tuple(t[k] for k in keys)
            comp = grouped.setdefault(kval, {})
            for m in schema.measure_names:
                if m in t:
                    comp.setdefault(m, set()).add(t[m])
        return [(kval, grouped[kval]) for kval in sorted(grouped)]

    by_key: dict = {}
    for t in rows:
        kval = tuple(t[k] for k in keys)
        mt = tuple(sorted((m, t[m]) for m in schema.measure_names if m in t))
        by_key.setdefault(kval, set()).add(mt)
    out = []
    for kval in sorted(by_key):
        for mt in sorted(by_key[kval]):
            out.append((kval, {m: {v} for m, v in mt}))
    return out


def m_chase_star(w: Warehouse, keep_intermediates: bool = False) -> ChaseResult:
    """Compute the chased m-table of a star warehouse in O(W log W)."""
    violations = validate_warehouse(w)
    if violations:
        raise InvalidWarehouse(violations)
    start = time.perf_counter()
    schema = w.schema
    keys = schema.key_attrs

    dim_grouped = [_group_dimension(d, rows) for d, rows in zip(schema.dimensions, w.dim_tables)]
    marked = [set() for _ in schema.dimensions]

    m_tuples = []
    fact_grouped = []
    pending: dict = {}  # kval -> list of (measure dict, joined components)
    for kval, measures in _fact_groups(schema, w.fact_table):
        comp = {k: {v} for k, v in zip(keys, kval)}
        comp.update({m: set(vs) for m, vs in measures.items()})
        if keep_intermediates:
            fact_grouped.append(MTuple(comp))
        joined = False
        for i, d in enumerate(schema.dimensions):
            entry = dim_grouped[i].get(kval[i])
            if entry is not None:
                joined = True
                marked[i].add(kval[i])
                for a, vs in entry.items():
                    if a != d.key:
                        comp[a] = set(vs)
        pending.setdefault(kval, []).append((measures, comp, joined))
    for kval, group in pending.items():
        # Without measure FDs a fact m-tuple subsumed by a fuller one of
        # the same key is redundant as soon as any dimension joins: the
        # generic chase removes it through the shared Ki -> Ai_j rule.
        measure_sets = [frozenset((m, v) for m, vs in ms.items() for v in vs) for ms, _, _ in group]
        for idx, (_, comp, joined) in enumerate(group):
            mine = measure_sets[idx]
            if joined and any(i != idx and mine < other for i, other in enumerate(measure_sets)):
                continue
            m_tuples.append(MTuple(comp))
    for i, d in enumerate(schema.dimensions):
        for kv, entry in dim_grouped[i].items():
            if kv not in marked[i]:
                m_tuples.append(MTuple(entry))

    stats = ChaseStats(len(m_tuples), _delta(m_tuples), w.size, time.perf_counter() - start)
    intermediates = None
    if keep_intermediates:
        intermediates = ChaseIntermediates(
            dim_grouped={
                d.name: tuple(MTuple(entry) for _, entry in sorted(dim_grouped[i].items()))
                for i, d in enumerate(schema.dimensions)
            },
            fact_grouped=tuple(fact_grouped),
        )
    return ChaseResult(m_tuples, schema.fds(), schema.universe, w.adom, stats,
                       schema=schema, intermediates=intermediates)


def chase_equivalence_check(w: Warehouse) -> bool:
    """True iff the star and generic algorithms agree as m-tuple sets."""
    star = m_chase_star(w)
    generic = m_chase_generic(build_star_table(w), w.schema.fds(), schema=w.schema)
    return star.as_set() == generic.as_set()


def serialize_m_table(res: ChaseResult) -> str:
    """Canonical text form: one JSON object per m-tuple, sorted components.

    Deterministic byte-for-byte for identical inputs; suitable for
    golden-file diffing.
    """
    lines = []
    for sigma in canonical_order(res):
        obj = {a: list(sigma.component(a)) for a in res.universe if a in sigma}
        lines.append(json.dumps(obj, ensure_ascii=False, separators=(",", ":")))
    return "\n".join(lines) + "\n"


def canonical_order(res: ChaseResult):
    """Fact-anchored m-tuples in key order, then orphans per dimension."""
    if res.schema is None:
        return list(res.m_tuples)
    out = list(res.fact_anchored)
    for d in res.schema.dimensions:
        out.extend(res.dim_orphans.get(d.name, ()))
    return out
