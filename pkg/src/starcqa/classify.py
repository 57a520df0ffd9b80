"""Membership of tuples in True / Confl / Cons, and their enumerations.

A tuple is true when some chased m-tuple contains it component-wise,
conflicting when additionally some applicable dependency has a
multi-valued component, and consistent when true with all applicable
components single-valued.  The verdict does not depend on the witness:
m-tuples sharing a key value share the components that dependencies
pin down.
"""

from __future__ import annotations

import enum

from .chase import ChaseResult
from .errors import EnumerationTooLarge
from .model import MTuple, Tup, enumerate_tuples, tuple_in_mtuple

DEFAULT_ENUMERATION_CAP = 10**6


class TupleStatus(enum.Enum):
    FALSE = "FALSE"
    TRUE_CONSISTENT = "TRUE_CONSISTENT"
    TRUE_CONFLICTING = "TRUE_CONFLICTING"


def _candidates(chase: ChaseResult, t: Tup):
    """M-tuples that could contain t, found through the key indexes."""
    if chase.schema is not None and len(t):
        keys = chase.schema.key_attrs
        if all(k in t for k in keys):
            return chase.index_by_k.get(tuple(t[k] for k in keys), ())
        for d in chase.schema.dimensions:
            if d.key in t:
                return chase.index_by_ki[d.name].get(t[d.key], ())
    return chase.m_tuples


def classify(chase: ChaseResult, t: Tup) -> TupleStatus:
    sch = t.schema
    for sigma in _candidates(chase, t):
        if sch <= sigma.schema and tuple_in_mtuple(t, sigma):
            for f in chase.fds:
                if f.lhs | {f.rhs} <= sch and len(sigma.component(f.rhs)) > 1:
                    return TupleStatus.TRUE_CONFLICTING
            return TupleStatus.TRUE_CONSISTENT
    return TupleStatus.FALSE


def confl_min(chase: ChaseResult, cap: int = DEFAULT_ENUMERATION_CAP) -> frozenset[Tup]:
    """Minimal conflicting tuples: one per (X-value, conflicting A-value).

    In the star setting these are exactly the tuples ki a over Ki A with
    a multi-valued dimension component, and k mi over the full key and a
    multi-valued measure component.
    """
    out: set[Tup] = set()
    for sigma in chase.m_tuples:
        for f in chase.fds:
            need = f.lhs | {f.rhs}
            if not need <= sigma.schema or len(sigma.component(f.rhs)) <= 1:
                continue
            for x in enumerate_tuples(sigma, f.lhs):
                for a in sigma.component(f.rhs):
                    d = x.as_dict()
                    d[f.rhs] = a
                    out.add(Tup(d))
                    if len(out) > cap:
                        raise EnumerationTooLarge(f"more than {cap} minimal conflicting tuples")
    return frozenset(out)


def cons_tuples_over(chase: ChaseResult, attrs, cap: int = DEFAULT_ENUMERATION_CAP) -> frozenset[Tup]:
    """All consistent tuples whose schema is exactly ``attrs``."""
    x = frozenset(attrs)
    if not x:
        return frozenset((Tup(),)) if chase.m_tuples else frozenset()
    out: set[Tup] = set()
    pinned = [f for f in chase.fds if f.lhs | {f.rhs} <= x]
    for sigma in chase.m_tuples:
        if not x <= sigma.schema:
            continue
        if any(len(sigma.component(f.rhs)) > 1 for f in pinned):
            continue
        if sigma.tuple_count(x) + len(out) > cap:
            raise EnumerationTooLarge(f"more than {cap} consistent tuples over {sorted(x)}")
        out.update(enumerate_tuples(sigma, x))
    return frozenset(out)
