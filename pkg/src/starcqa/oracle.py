"""Repair-enumeration oracle: evaluate queries in every repair, combine.

Ground truth for the whole engine at desk scale.  Truth membership is
read off expanded m-tuples with the oracle's own code; per-repair
evaluation works on the repair's anchor rows; aggregation, grouping
and intersection are written here, independent of the optimized paths.
Only condition evaluation is shared, so that both sides agree on what
a condition means.
"""

from __future__ import annotations

from dataclasses import dataclass

from .analytics import AnalyticQuery, GroupedAnswer, IntervalAnswer
from .chase import ChaseResult
from .conditions import eval_condition
from .model import Tup
from .query import StandardQuery
from .repairs import Repair, enumerate_repairs, repair_true_tuples_over


def answer_in_repair_standard(chase: ChaseResult, r: Repair, q: StandardQuery) -> frozenset[Tup]:
    """Tuples x over X with some condition-satisfying extension true in R."""
    X = frozenset(q.projection)
    out = set()
    for t in repair_true_tuples_over(chase, r, q.schema):
        if eval_condition(q.condition, t):
            out.add(t.restrict(X))
    return frozenset(out)


def _qualifying_rows(chase: ChaseResult, r: Repair, aq: AnalyticQuery):
    """Fact anchor rows of the repair that enter the aggregation."""
    keys = chase.schema.key_set
    agg = aq.aggregate
    need = set(aq.group_by)
    if agg.measure is not None:
        need.add(agg.measure)
    out = []
    for row in r.anchor_rows:
        if not keys <= row.schema or not need <= row.schema:
            continue
        if aq.condition is not None:
            from .conditions import cond_schema

            cs = cond_schema(aq.condition)
            if not cs <= row.schema:
                continue  # missing values never satisfy a condition
            if not eval_condition(aq.condition, row):
                continue
        out.append(row)
    return out


def _aggregate_values(aq: AnalyticQuery, rows):
    agg = aq.aggregate
    if agg.op == "count":
        if agg.distinct:
            return len({row[agg.measure] for row in rows})
        return len(rows)
    vals = [row[agg.measure] for row in rows]
    if not vals:
        return None
    if agg.op == "min":
        return min(vals)
    if agg.op == "max":
        return max(vals)
    return sum(vals)


def answer_in_repair_analytic(chase: ChaseResult, r: Repair, aq: AnalyticQuery):
    """Scalar value (None for NULL) or dict group-key -> value."""
    rows = _qualifying_rows(chase, r, aq)
    if not aq.group_by:
        if not rows:
            return 0 if aq.aggregate.op == "count" else None
        return _aggregate_values(aq, rows)
    groups: dict[Tup, list] = {}
    for row in rows:
        groups.setdefault(row.restrict(aq.group_by), []).append(row)
    answer = {x: _aggregate_values(aq, g) for x, g in groups.items()}
    if aq.having:
        kept = {}
        for x, g in groups.items():
            ok = True
            for c in aq.having:
                hrows = [row for row in g if c.measure in row]
                sub = AnalyticQuery(_mk_aggregate(c.op, c.measure), None, ())
                v = _aggregate_values(sub, hrows)
                if v is None or not c.interval_inside(v, v):
                    ok = False
                    break
            if ok:
                kept[x] = answer[x]
        return kept
    return answer


def _mk_aggregate(op, measure):
    from .analytics import Aggregate

    return Aggregate(op, measure)


@dataclass(frozen=True)
class OracleReport:
    per_repair: tuple
    combined: object
    agrees_with_engine: bool | None = None


def oracle_consistent_answer(chase: ChaseResult, query, repairs=None, limit=None, engine_answer=None) -> OracleReport:
    """Combine per-repair answers by Definition of consistent answers."""
    if repairs is None:
        from .repairs import DEFAULT_REPAIR_LIMIT

        repairs = tuple(enumerate_repairs(chase, limit or DEFAULT_REPAIR_LIMIT))
    per = []
    if isinstance(query, StandardQuery):
        for i, r in enumerate(repairs):
            per.append((i, answer_in_repair_standard(chase, r, query)))
        combined = frozenset.intersection(*(a for _, a in per)) if per else frozenset()
    elif not query.group_by:
        empties = False
        values = []
        for i, r in enumerate(repairs):
            rows = _qualifying_rows(chase, r, query)
            v = _aggregate_values(query, rows) if rows else None
            per.append((i, v if rows else None))
            if not rows:
                empties = True
            else:
                values.append(v)
        if empties or not values:
            combined = IntervalAnswer.count_zero() if query.aggregate.op == "count" else IntervalAnswer.null()
        else:
            combined = IntervalAnswer.interval(min(values), max(values), True)
    else:
        answers = []
        for i, r in enumerate(repairs):
            a = answer_in_repair_analytic(chase, r, query)
            per.append((i, a))
            answers.append(a)
        shared = set.intersection(*(set(a) for a in answers)) if answers else set()
        rows = []
        for x in sorted(shared, key=lambda t: t.items()):
            vals = [a[x] for a in answers]
            rows.append((x, IntervalAnswer.interval(min(vals), max(vals), True)))
        combined = GroupedAnswer(tuple(rows))
    agrees = None if engine_answer is None else combined == engine_answer
    return OracleReport(tuple(per), combined, agrees)


def oracle_strong_answer(chase: ChaseResult, aq: AnalyticQuery, repairs=None, limit=None):
    """Aggregate of the consistent answer to the key-projecting companion query."""
    agg = aq.aggregate
    proj = set(chase.schema.key_attrs) | set(aq.group_by)
    if agg.measure is not None:
        proj.add(agg.measure)
    q = StandardQuery(frozenset(proj), aq.condition)
    report = oracle_consistent_answer(chase, q, repairs=repairs, limit=limit)
    rows = report.combined
    if not aq.group_by:
        if agg.op == "count":
            return len(rows)
        vals = [t[agg.measure] for t in rows]
        if not vals:
            return None
        return {"min": min, "max": max, "sum": sum}[agg.op](vals)
    groups: dict[Tup, list] = {}
    for t in rows:
        groups.setdefault(t.restrict(aq.group_by), []).append(t)
    out = []
    for x in sorted(groups, key=lambda t: t.items()):
        g = groups[x]
        if agg.op == "count":
            out.append((x, len(g)))
        else:
            vals = [t[agg.measure] for t in g]
            out.append((x, {"min": min, "max": max, "sum": sum}[agg.op](vals)))
    return tuple(out)
