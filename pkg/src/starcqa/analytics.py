"""Interval-valued consistent answers to aggregate queries.

One accumulator scan drives every mode.  Per group (or globally when no
group-by is present) an m-tuple is a candidate when some combination of
its component values lands in the group and satisfies the condition,
and certain when every combination does; certain m-tuples contribute to
both interval endpoints, candidates only widen the uncertain side.
Strongly consistent answers aggregate the single-valued certain
contributions and are exact for every operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .chase import ChaseResult
from .conditions import decompose_independent, sat_sets
from .errors import EngineError, EnumerationTooLarge, UnsupportedAggregate, UnsupportedHaving
from .model import Tup, enumerate_tuples

AGGREGATE_OPS = ("min", "max", "count", "sum")
DEFAULT_GROUP_CAP = 10**6


@dataclass(frozen=True)
class Aggregate:
    op: str
    measure: str | None = None
    distinct: bool = False
    star: bool = False  # count(*)

    def __post_init__(self):
        if self.op not in AGGREGATE_OPS:
            raise ValueError(f"unsupported aggregate {self.op!r}")
        if self.star and self.op != "count":
            raise ValueError("* only with count")
        if self.distinct and self.op != "count":
            raise ValueError("distinct only with count")
        if self.measure is None and not self.star:
            raise ValueError("aggregate needs a measure")


@dataclass(frozen=True)
class HavingConjunct:
    """All atoms constraining one aggregate term; their Sat set is an interval."""

    op: str
    measure: str
    atoms: tuple[tuple[str, object], ...]  # (theta, bound), theta in < <= > >=

    def interval_inside(self, glb, lub) -> bool:
        ops = {"<": lambda v, b: v < b, "<=": lambda v, b: v <= b,
               ">": lambda v, b: v > b, ">=": lambda v, b: v >= b}
        return all(ops[th](v, bound) for th, bound in self.atoms for v in (glb, lub))


@dataclass(frozen=True)
class AnalyticQuery:
    aggregate: Aggregate
    condition: object | None = None
    group_by: tuple[str, ...] = ()
    having: tuple[HavingConjunct, ...] = ()

    def __post_init__(self):
        if self.having and not self.group_by:
            raise ValueError("having requires group by")


NULL = "null"
COUNT_ZERO = "count_zero"
INTERVAL = "interval"


@dataclass(frozen=True)
class IntervalAnswer:
    kind: str
    glb: object = None
    lub: object = None
    exact: bool = True

    @classmethod
    def null(cls):
        return cls(NULL)

    @classmethod
    def count_zero(cls):
        return cls(COUNT_ZERO, 0, 0, True)

    @classmethod
    def interval(cls, glb, lub, exact):
        return cls(INTERVAL, glb, lub, exact)

    def as_pair(self):
        return (self.glb, self.lub)


@dataclass(frozen=True)
class GroupedAnswer:
    rows: tuple[tuple[Tup, IntervalAnswer], ...]

    def as_dict(self) -> dict:
        return dict(self.rows)


@dataclass
class ScanAccumulator:
    """Outcome of one Compute-Aggregate scan.

    Absent accumulators stand for the below/above-everything sentinels:
    aggregating an absent value with m yields m.
    """

    op: str
    changed: bool = False
    min_acc: object = None
    max_acc: object = None
    strong_acc: object = None
    strong_changed: bool = False
    nonneg: bool = True

    def __post_init__(self):
        if self.op == "count":
            self.min_acc = 0
            self.max_acc = 0
            self.strong_acc = 0


def _aggr(op, acc, v):
    if acc is None:
        return v
    if op == "min":
        return min(acc, v)
    if op == "max":
        return max(acc, v)
    return acc + v  # sum


def _query_attrs(aq: AnalyticQuery, schg) -> frozenset[str]:
    need = set(aq.group_by) | set(schg)
    if aq.aggregate.measure is not None:
        need.add(aq.aggregate.measure)
    return frozenset(need)


def compute_aggregate(scan, aq: AnalyticQuery, chase: ChaseResult, sat=None, x: Tup | None = None) -> ScanAccumulator:
    """Scan m-tuples accumulating interval endpoints and the strong answer.

    ``sat`` maps condition attributes to their satisfying active-domain
    values; ``x`` pins the group key.  An m-tuple whose group membership
    or condition satisfaction depends on the choice of repair only
    widens the endpoint it can move.
    """
    _require_star(chase)
    agg = aq.aggregate
    op = agg.op
    if sat is None:
        sat = sat_sets(decompose_independent(aq.condition), chase)
    schg = frozenset(sat)
    X = frozenset(aq.group_by)
    need = chase.schema.key_set | _query_attrs(aq, schg)
    acc = ScanAccumulator(op)

    for sigma in scan:
        if not need <= sigma.schema:
            continue
        # candidate: some combination reaches the group and satisfies the condition
        if x is not None:
            if any(x[a] not in set(sigma.component(a)) for a in X):
                continue
            if any(b in X and x[b] not in sat[b] for b in schg):
                continue
        if any(b not in X and not set(sigma.component(b)) & sat[b] for b in schg):
            continue

        if agg.measure is not None:
            m = agg.measure
            if m in X:
                vals = (x[m],)
            elif m in schg:
                vals = tuple(v for v in sigma.component(m) if v in sat[m])
            else:
                vals = sigma.component(m)
            min_s, max_s = min(vals), max(vals)
            if isinstance(min_s, (int, float)) and min_s < 0:
                acc.nonneg = False

        certain = all(len(sigma.component(a)) == 1 for a in X) and all(
            set(sigma.component(b)) <= sat[b] for b in schg
        )
        if certain:
            acc.changed = True
            if op == "count":
                acc.min_acc += 1
                acc.max_acc += 1
                if agg.star or len(sigma.component(agg.measure)) == 1:
                    acc.strong_acc += 1
                    acc.strong_changed = True
            else:
                acc.min_acc = _aggr(op, acc.min_acc, min_s)
                acc.max_acc = _aggr(op, acc.max_acc, max_s)
                if len(sigma.component(m)) == 1:
                    acc.strong_acc = _aggr(op, acc.strong_acc, vals[0])
                    acc.strong_changed = True
        else:
            if op == "min":
                acc.min_acc = min_s if acc.min_acc is None else min(min_s, acc.min_acc)
            elif op == "max":
                acc.max_acc = max_s if acc.max_acc is None else max(max_s, acc.max_acc)
            elif op == "count":
                acc.max_acc += 1
            else:  # sum: only signed values can move an endpoint
                if min_s < 0:
                    acc.min_acc = _aggr(op, acc.min_acc, min_s)
                if max_s > 0:
                    acc.max_acc = _aggr(op, acc.max_acc, max_s)
    return acc


def _require_star(chase: ChaseResult):
    if chase.schema is None:
        raise EngineError("analytic queries need a star-schema chase")


def sigma_sets(chase: ChaseResult, aq: AnalyticQuery):
    """(candidates, certain, certain with single-valued measure)."""
    _require_star(chase)
    sat = sat_sets(decompose_independent(aq.condition), chase)
    schg = frozenset(sat)
    need = chase.schema.key_set | _query_attrs(aq, schg)
    big, plus, plus1 = [], [], []
    for sigma in chase.m_tuples:
        if not need <= sigma.schema:
            continue
        if any(not set(sigma.component(b)) & sat[b] for b in schg):
            continue
        big.append(sigma)
        if all(set(sigma.component(b)) <= sat[b] for b in schg):
            plus.append(sigma)
            if aq.aggregate.measure and len(sigma.component(aq.aggregate.measure)) == 1:
                plus1.append(sigma)
    return tuple(big), tuple(plus), tuple(plus1)


def _interval_from(acc: ScanAccumulator, op: str) -> IntervalAnswer:
    exact = op != "sum" or acc.nonneg
    return IntervalAnswer.interval(acc.min_acc, acc.max_acc, exact)


def cons_answer_no_groupby(chase: ChaseResult, aq: AnalyticQuery):
    """(interval or NULL/zero, strongly consistent value or None)."""
    sat = sat_sets(decompose_independent(aq.condition), chase)
    acc = compute_aggregate(chase.m_tuples, aq, chase, sat)
    if not acc.changed:
        if aq.aggregate.op == "count":
            return IntervalAnswer.count_zero(), 0
        return IntervalAnswer.null(), None
    strong = acc.strong_acc if (aq.aggregate.op == "count" or acc.strong_changed) else None
    return _interval_from(acc, aq.aggregate.op), strong


def _group_candidates(chase: ChaseResult, aq: AnalyticQuery, sat, cap=DEFAULT_GROUP_CAP):
    """M-tuples defined over the query schema with consistent group keys,
    plus the group-key tuples they can produce."""
    X = frozenset(aq.group_by)
    schg = frozenset(sat)
    need = chase.schema.key_set | _query_attrs(aq, schg)
    pinned = [f for f in chase.fds if f.lhs | {f.rhs} <= X]
    temp = []
    keys: set[Tup] = set()
    budget = cap
    for sigma in chase.m_tuples:
        if not need <= sigma.schema:
            continue
        if any(len(sigma.component(f.rhs)) > 1 for f in pinned):
            continue
        if any(b not in X and not set(sigma.component(b)) & sat[b] for b in schg):
            continue
        temp.append(sigma)
        budget -= sigma.tuple_count(X)
        if budget < 0:
            raise EnumerationTooLarge(f"more than {cap} group keys")
        keys.update(enumerate_tuples(sigma, X))
    return temp, sorted(keys, key=lambda t: tuple(t[a] for a in sorted(X)))


def cons_answer_groupby(chase: ChaseResult, aq: AnalyticQuery):
    """(grouped intervals, strong pairs); group keys are always consistent."""
    sat = sat_sets(decompose_independent(aq.condition), chase)
    temp, keys = _group_candidates(chase, aq, sat)
    rows = []
    strong = []
    for x in keys:
        acc = compute_aggregate(temp, aq, chase, sat, x=x)
        if not acc.changed:
            continue
        rows.append((x, _interval_from(acc, aq.aggregate.op)))
        if aq.aggregate.op == "count":
            if acc.strong_acc > 0:
                strong.append((x, acc.strong_acc))
        elif acc.strong_changed:
            strong.append((x, acc.strong_acc))
    return GroupedAnswer(tuple(rows)), tuple(strong)


def cons_answer_having(chase: ChaseResult, aq: AnalyticQuery) -> GroupedAnswer:
    """Keep a group when every having interval sits inside its Sat interval."""
    sums = [c.measure for c in aq.having if c.op == "sum"]
    if aq.aggregate.op == "sum":
        sums.append(aq.aggregate.measure)
    for m in sums:
        if any(isinstance(v, (int, float)) and v < 0 for v in chase.adom.get(m, ())):
            raise UnsupportedHaving(f"sum over measure {m} with negative values")
    sat = sat_sets(decompose_independent(aq.condition), chase)
    base = AnalyticQuery(aq.aggregate, aq.condition, aq.group_by)
    temp, keys = _group_candidates(chase, base, sat)
    out = []
    for x in keys:
        acc = compute_aggregate(temp, base, chase, sat, x=x)
        if not acc.changed:
            continue
        keep = True
        for c in aq.having:
            sub = AnalyticQuery(Aggregate(c.op, c.measure), aq.condition, aq.group_by)
            sub_acc = compute_aggregate(chase.m_tuples, sub, chase, sat, x=x)
            if not sub_acc.changed or not c.interval_inside(sub_acc.min_acc, sub_acc.max_acc):
                keep = False
                break
        if keep:
            out.append((x, _interval_from(acc, aq.aggregate.op)))
    return GroupedAnswer(tuple(out))


def count_distinct_bounds(chase: ChaseResult, aq: AnalyticQuery) -> IntervalAnswer:
    """Tractable approximation of count(distinct M): exact when every
    candidate measure component is single-valued."""
    big, plus, plus1 = sigma_sets(chase, aq)
    if not plus:
        return IntervalAnswer.count_zero()
    m = aq.aggregate.measure
    all_vals = set()
    for sigma in big:
        all_vals.update(sigma.component(m))
    count_max = min(len(big), len(all_vals))
    certain_vals = set()
    for sigma in plus1:
        certain_vals.update(sigma.component(m))
    count_min = max(1, len(certain_vals))
    exact = all(len(sigma.component(m)) == 1 for sigma in big)
    return IntervalAnswer.interval(count_min, count_max, exact)


def answer_analytic(chase: ChaseResult, aq: AnalyticQuery):
    """Dispatch to the right evaluation mode; returns (answer, strong)."""
    if aq.aggregate.distinct:
        if aq.group_by:
            raise UnsupportedAggregate("count(distinct) with group by is not supported")
        return count_distinct_bounds(chase, aq), None
    if aq.having:
        return cons_answer_having(chase, aq), None
    if aq.group_by:
        return cons_answer_groupby(chase, aq)
    return cons_answer_no_groupby(chase, aq)
