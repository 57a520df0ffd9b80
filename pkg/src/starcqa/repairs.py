"""Repair materialization through choice functions (the three-step process).

A repair is determined by choosing one value from every chased
component that a dependency feeds: per (dimension key value, attribute)
and per (full key value, measure).  The repair's rows are the chosen
anchor tuples, one per m-tuple; together with the consistent tuples
they generate the repair's true set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .bruteforce import TruthTable
from .chase import ChaseResult
from .classify import TupleStatus, classify
from .errors import InvalidChoice, RepairSpaceTooLarge, TrueSetTooLarge
from .model import Tup, enumerate_tuples, tuple_sort_key

DEFAULT_REPAIR_LIMIT = 10**4


@dataclass(frozen=True)
class ChoicePoint:
    """One independent choice: a chased component fed by a dependency.

    ``label`` is ("dim", dimension, key value, attr) for dimension
    attributes, ("measure", full key value, attr) for measures, and
    ("generic", attr, representative index) for non-star chases.
    """

    label: tuple
    attr: str
    values: tuple

    def __lt__(self, other):
        return self.label < other.label


@dataclass(frozen=True)
class ChoiceFunction:
    points: tuple[ChoicePoint, ...]
    values: tuple

    def value_at(self, point: ChoicePoint):
        try:
            return self.values[self.points.index(point)]
        except ValueError:
            raise InvalidChoice(f"choice function has no point {point.label}") from None

    @property
    def dim_choices(self) -> dict:
        return {
            (p.label[2], p.attr): v
            for p, v in zip(self.points, self.values)
            if p.label[0] == "dim"
        }

    @property
    def measure_choices(self) -> dict:
        return {
            (p.label[1], p.attr): v
            for p, v in zip(self.points, self.values)
            if p.label[0] == "measure"
        }


@dataclass(frozen=True)
class Repair:
    anchor_rows: tuple[Tup, ...]
    choice: ChoiceFunction | None = None

    def fact_rows(self, key_attrs) -> tuple[Tup, ...]:
        ks = frozenset(key_attrs)
        return tuple(t for t in self.anchor_rows if ks <= t.schema)


def _rhs_attrs(chase: ChaseResult) -> frozenset[str]:
    return frozenset(f.rhs for f in chase.fds)


def _choice_structure(chase: ChaseResult):
    """(sorted points, map (m-tuple index, attr) -> point index)."""
    cached = getattr(chase, "_choice_structure", None)
    if cached is not None:
        return cached
    rhs = _rhs_attrs(chase)
    if any(f.lhs & rhs for f in chase.fds):
        raise InvalidChoice("repairs need dependencies with key-like left-hand sides")
    raw: dict[tuple, dict] = {}  # label -> {"values": ..., "members": set}
    if chase.schema is not None:
        schema = chase.schema
        keys = schema.key_attrs
        for si, sigma in enumerate(chase.m_tuples):
            for di, d in enumerate(schema.dimensions):
                if d.key not in sigma:
                    continue
                kv = sigma.component(d.key)[0]
                for a, _ in d.non_keys:
                    if a in sigma:
                        label = ("dim", di, kv, a)
                        entry = raw.setdefault(label, {"attr": a, "values": sigma.component(a), "members": set()})
                        entry["members"].add(si)
            if schema.measure_fds and schema.key_set <= sigma.schema:
                kval = tuple(sigma.component(k)[0] for k in keys)
                for m in schema.measure_names:
                    if m in sigma:
                        label = ("measure", kval, m)
                        entry = raw.setdefault(label, {"attr": m, "values": sigma.component(m), "members": set()})
                        entry["members"].add(si)
    else:
        # cluster (m-tuple, rhs attr) pairs merged by some dependency
        parent: dict = {}

        def find(x):
            while parent.setdefault(x, x) != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            parent[find(x)] = find(y)

        sigmas = chase.m_tuples
        for i, si in enumerate(sigmas):
            for a in si.schema & rhs:
                find((i, a))
        for f in chase.fds:
            for i, si in enumerate(sigmas):
                if not (f.lhs | {f.rhs}) <= si.schema:
                    continue
                for j in range(i + 1, len(sigmas)):
                    sj = sigmas[j]
                    if not (f.lhs | {f.rhs}) <= sj.schema:
                        continue
                    if all(set(si.component(b)) & set(sj.component(b)) for b in f.lhs):
                        union((i, f.rhs), (j, f.rhs))
        clusters: dict = {}
        for x in list(parent):
            clusters.setdefault(find(x), set()).add(x)
        for root, members in clusters.items():
            idx = min(i for i, _ in members)
            attr = root[1]
            label = ("generic", attr, idx)
            raw[label] = {
                "attr": attr,
                "values": chase.m_tuples[idx].component(attr),
                "members": {i for i, _ in members},
            }

    points = tuple(ChoicePoint(label, raw[label]["attr"], raw[label]["values"]) for label in sorted(raw))
    assign: dict[tuple, int] = {}
    for pi, p in enumerate(points):
        for si in raw[p.label]["members"]:
            assign[(si, p.attr)] = pi
    structure = (points, assign)
    chase._choice_structure = structure
    return structure


def repair_space_size(chase: ChaseResult) -> int:
    points, _ = _choice_structure(chase)
    n = 1
    for p in points:
        n *= len(p.values)
    return n


def enumerate_choice_functions(chase: ChaseResult, limit: int = DEFAULT_REPAIR_LIMIT):
    points, _ = _choice_structure(chase)
    size = repair_space_size(chase)
    if size > limit:
        raise RepairSpaceTooLarge(f"repair space has {size} elements (limit {limit})")
    for combo in itertools.product(*(p.values for p in points)):
        yield ChoiceFunction(points, combo)


def build_repair(chase: ChaseResult, phi: ChoiceFunction) -> Repair:
    points, assign = _choice_structure(chase)
    if phi.points != points:
        raise InvalidChoice("choice function does not match this chase")
    for p, v in zip(phi.points, phi.values):
        if v not in p.values:
            raise InvalidChoice(f"value {v!r} not available at point {p.label}")
    anchors = []
    for si, sigma in enumerate(chase.m_tuples):
        d = {}
        for a, comp in sigma.items():
            pi = assign.get((si, a))
            d[a] = phi.values[pi] if pi is not None else comp[0]
        anchors.append(Tup(d))
    anchors = tuple(sorted(set(anchors), key=lambda t: tuple_sort_key(t, chase.universe)))
    return Repair(anchors, phi)


def enumerate_repairs(chase: ChaseResult, limit: int = DEFAULT_REPAIR_LIMIT):
    for phi in enumerate_choice_functions(chase, limit):
        yield build_repair(chase, phi)


def _phi_map(chase: ChaseResult, repair: Repair) -> dict:
    """(m-tuple index, attr) -> chosen value."""
    points, assign = _choice_structure(chase)
    if repair.choice is None or repair.choice.points != points:
        raise InvalidChoice("repair does not carry a choice function for this chase")
    by_point = dict(zip(points, repair.choice.values))
    return {key: by_point[points[pi]] for key, pi in assign.items()}


def repair_contains(chase: ChaseResult, repair: Repair, t: Tup, phi: dict | None = None) -> bool:
    """Membership in True(R): some m-tuple contains t and every dependency
    pinned inside sch(t) lands on the chosen value; other attributes are
    free over the components (partial tuples may keep non-chosen values)."""
    if phi is None:
        phi = _phi_map(chase, repair)
    sch = t.schema
    pinned = [f for f in chase.fds if f.lhs | {f.rhs} <= sch]
    for si, sigma in enumerate(chase.m_tuples):
        if not sch <= sigma.schema:
            continue
        if any(t[a] not in set(sigma.component(a)) for a in sch):
            continue
        if all(t[f.rhs] == phi[(si, f.rhs)] for f in pinned):
            return True
    return False


def repair_true_tuples_over(chase: ChaseResult, repair: Repair, attrs,
                            cap: int = 200_000) -> frozenset[Tup]:
    """All tuples over exactly ``attrs`` true in the repair."""
    phi = _phi_map(chase, repair)
    S = frozenset(attrs)
    pinned = [f for f in chase.fds if f.lhs | {f.rhs} <= S]
    names = sorted(S)
    out: set[Tup] = set()
    for si, sigma in enumerate(chase.m_tuples):
        if not S <= sigma.schema:
            continue
        forced = {f.rhs: phi[(si, f.rhs)] for f in pinned}
        comps = [(forced[a],) if a in forced else sigma.component(a) for a in names]
        n = 1
        for c in comps:
            n *= len(c)
        if len(out) + n > cap:
            raise TrueSetTooLarge(f"repair true set over {names} exceeds {cap} tuples")
        for combo in itertools.product(*comps):
            out.add(Tup(zip(names, combo)))
    return frozenset(out)


def _repair_fd_value_map(chase: ChaseResult, repair: Repair):
    out = {}
    for f in chase.fds:
        need = f.lhs | {f.rhs}
        vals: dict = {}
        for t in repair_true_tuples_over(chase, repair, need):
            xv = tuple(t[b] for b in sorted(f.lhs))
            vals.setdefault(xv, set()).add(t[f.rhs])
        out[f] = vals
    return out


def verify_repair(chase: ChaseResult, candidate, cap: int = 200_000) -> bool:
    """Desk-scale check of the repair conditions for a Repair or raw rows.

    Verifies FD satisfaction of the induced true set, the inclusions
    Cons(T) ⊆ True(R) ⊆ True(T), and maximality (no true tuple can be
    added without breaking a dependency or adding nothing).
    """
    if isinstance(candidate, Repair):
        rows = candidate.anchor_rows
        phi = _phi_map(chase, candidate)

        def member(t):
            return repair_contains(chase, candidate, t, phi)

        fd_vals = _repair_fd_value_map(chase, candidate)
    else:
        rows = tuple(candidate)
        tt = TruthTable(rows, chase.fds, cap)
        if tt.has_conflict():
            return False
        member = tt.is_true
        fd_vals = {f: dict(v) for f, v in tt.fd_values.items()}

    # 1. the generated true set satisfies every dependency
    for vals in fd_vals.values():
        if any(len(vs) > 1 for vs in vals.values()):
            return False

    # 2/3/4. schema-by-schema sweep over all true tuples of T
    budget = cap
    for sigma in chase.m_tuples:
        sch = sorted(sigma.schema)
        for mask in range(1, 1 << len(sch)):
            attrs = frozenset(sch[i] for i in range(len(sch)) if mask >> i & 1)
            budget -= sigma.tuple_count(attrs)
            if budget < 0:
                raise TrueSetTooLarge("verify_repair instance too large")
            pinned = [f for f in chase.fds if f.lhs | {f.rhs} <= attrs]
            consistent_here = all(len(sigma.component(f.rhs)) == 1 for f in pinned)
            for t in enumerate_tuples(sigma, attrs):
                known = member(t)
                if consistent_here and not known:
                    return False  # a consistent tuple of T is not true in R
                if known:
                    continue
                # maximality: can t be added without conflict?
                ok = True
                for f in pinned:
                    xv = tuple(t[b] for b in sorted(f.lhs))
                    vs = fd_vals[f].get(xv)
                    if vs and vs != {t[f.rhs]}:
                        ok = False
                        break
                if ok:
                    return False  # t is addable: R was not maximal
    # every anchor/true tuple must already be true in T
    for t in rows:
        if classify(chase, t) is TupleStatus.FALSE:
            return False
    return True
