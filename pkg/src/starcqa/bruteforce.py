"""Brute-force truth computation by tuple-level FD saturation.

This is deliberately independent of the m-tuple machinery: starting
from the raw table rows it derives new tuples one value at a time (for
X -> A, any tuple agreeing with a donor on X acquires the donor's
A-value as an alternative), then answers truth, conflict and
consistency questions from the saturated set.  Only usable at desk
scale; the cap guards against blow-up.
"""

from __future__ import annotations

from .errors import TrueSetTooLarge
from .model import FD, Tup


def saturate(rows, fds, cap: int = 200_000) -> frozenset[Tup]:
    fds = tuple(fds)
    work: set[Tup] = set(rows)
    queue = list(work)
    # per FD: X-value -> (tuples defined on X, donors also defined on A)
    buckets: dict[FD, dict] = {f: {} for f in fds}

    def push(t: Tup):
        if t not in work:
            if len(work) >= cap:
                raise TrueSetTooLarge(f"saturation exceeded {cap} tuples")
            work.add(t)
            queue.append(t)

    while queue:
        t = queue.pop()
        sch = t.schema
        for f in fds:
            if not f.lhs <= sch:
                continue
            xval = tuple(t[b] for b in sorted(f.lhs))
            members, donors = buckets[f].setdefault(xval, ([], []))
            if f.rhs in sch:
                a = t[f.rhs]
                for p in members:
                    if p.get(f.rhs) != a:
                        d = p.as_dict()
                        d[f.rhs] = a
                        push(Tup(d))
                donors.append(t)
            for q in donors:
                a = q[f.rhs]
                if t.get(f.rhs) != a:
                    d = t.as_dict()
                    d[f.rhs] = a
                    push(Tup(d))
            members.append(t)
    return frozenset(work)


class TruthTable:
    """Truth/conflict/consistency queries over a saturated tuple set."""

    def __init__(self, rows, fds, cap: int = 200_000):
        self.fds = tuple(fds)
        self.saturated = saturate(rows, self.fds, cap)
        self.fd_values: dict[FD, dict] = {}
        for f in self.fds:
            need = f.lhs | {f.rhs}
            vals: dict = {}
            for t in self.saturated:
                if need <= t.schema:
                    xval = tuple(t[b] for b in sorted(f.lhs))
                    vals.setdefault(xval, set()).add(t[f.rhs])
            self.fd_values[f] = vals
        self._over: dict[frozenset, frozenset] = {}

    def true_over(self, schema) -> frozenset[Tup]:
        s = frozenset(schema)
        got = self._over.get(s)
        if got is None:
            got = frozenset(t.restrict(s) for t in self.saturated if s <= t.schema)
            self._over[s] = got
        return got

    def is_true(self, t: Tup) -> bool:
        return t in self.true_over(t.schema)

    def is_conflicting(self, t: Tup) -> bool:
        sch = t.schema
        for f in self.fds:
            if f.lhs | {f.rhs} <= sch:
                xval = tuple(t[b] for b in sorted(f.lhs))
                if len(self.fd_values[f].get(xval, ())) > 1:
                    return True
        return False

    def cons_over(self, schema) -> frozenset[Tup]:
        return frozenset(t for t in self.true_over(schema) if not self.is_conflicting(t))

    def has_conflict(self) -> bool:
        return any(len(vs) > 1 for vals in self.fd_values.values() for vs in vals.values())

    def all_schemas(self):
        seen = set()
        for t in self.saturated:
            seen.add(t.schema)
        # every subset of a saturated schema can hold true tuples
        out = set()
        for s in seen:
            out |= _subsets(s)
        return sorted(out, key=lambda s: (len(s), sorted(s)))


def _subsets(s: frozenset):
    items = sorted(s)
    out = []
    for mask in range(1, 1 << len(items)):
        out.append(frozenset(items[i] for i in range(len(items)) if mask >> i & 1))
    return out
