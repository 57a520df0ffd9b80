"""Selection-condition algebra: evaluation, CNF, independence, Sat sets.

Independence detection is syntactic: the condition is converted to CNF
and accepted when every clause mentions exactly one attribute and no
atom compares two attributes.  A condition semantically equivalent to
an independent one may therefore be rejected; callers fall back to the
bounds path.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AttributeNotDefined, NotIndependent

CNF_CLAUSE_CAP = 256

_FLIP = {"=": "!=", "!=": "=", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}
_OPS = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


@dataclass(frozen=True)
class Atom:
    attr: str
    op: str
    value: object


@dataclass(frozen=True)
class AttrAtom:
    left: str
    op: str
    right: str


@dataclass(frozen=True)
class Not:
    child: object


@dataclass(frozen=True)
class And:
    children: tuple


@dataclass(frozen=True)
class Or:
    children: tuple


Condition = object  # Atom | AttrAtom | Not | And | Or


def cond_schema(g) -> frozenset[str]:
    if g is None:
        return frozenset()
    if isinstance(g, Atom):
        return frozenset((g.attr,))
    if isinstance(g, AttrAtom):
        return frozenset((g.left, g.right))
    if isinstance(g, Not):
        return cond_schema(g.child)
    return frozenset().union(*(cond_schema(c) for c in g.children))


def _compare(a, op, b) -> bool:
    num = lambda v: isinstance(v, (int, float)) and not isinstance(v, bool)
    if num(a) != num(b):
        raise AttributeNotDefined(f"cannot compare {a!r} with {b!r}")
    return _OPS[op](a, b)


def eval_condition(g, t) -> bool:
    """Two-valued evaluation; the tuple must be defined on sch(g)."""
    if g is None:
        return True
    if isinstance(g, Atom):
        return _compare(t[g.attr], g.op, g.value)
    if isinstance(g, AttrAtom):
        return _compare(t[g.left], g.op, t[g.right])
    if isinstance(g, Not):
        return not eval_condition(g.child, t)
    if isinstance(g, And):
        return all(eval_condition(c, t) for c in g.children)
    if isinstance(g, Or):
        return any(eval_condition(c, t) for c in g.children)
    raise TypeError(f"not a condition: {g!r}")


def _nnf(g, neg: bool):
    if isinstance(g, Atom):
        return Atom(g.attr, _FLIP[g.op], g.value) if neg else g
    if isinstance(g, AttrAtom):
        return AttrAtom(g.left, _FLIP[g.op], g.right) if neg else g
    if isinstance(g, Not):
        return _nnf(g.child, not neg)
    kids = tuple(_nnf(c, neg) for c in g.children)
    if isinstance(g, And):
        return Or(kids) if neg else And(kids)
    return And(kids) if neg else Or(kids)


def to_cnf(g, cap: int = CNF_CLAUSE_CAP) -> tuple[tuple, ...]:
    """CNF as a tuple of clauses, each clause a tuple of atoms."""

    def cnf(node):
        if isinstance(node, (Atom, AttrAtom)):
            return ((node,),)
        if isinstance(node, And):
            out = []
            for c in node.children:
                out.extend(cnf(c))
                if len(out) > cap:
                    raise NotIndependent(f"CNF exceeds {cap} clauses", clause=None)
            return tuple(out)
        if isinstance(node, Or):
            parts = [cnf(c) for c in node.children]
            acc = ((),)
            for p in parts:
                acc = tuple(c1 + c2 for c1 in acc for c2 in p)
                if len(acc) > cap:
                    raise NotIndependent(f"CNF exceeds {cap} clauses", clause=None)
            return acc
        raise TypeError(f"not in NNF: {node!r}")

    return cnf(_nnf(g, False))


@dataclass(frozen=True)
class IndependentCondition:
    """Per-attribute split of an independent condition."""

    per_attr: tuple[tuple[str, object], ...]  # (attribute, single-attribute condition)

    @property
    def schema(self) -> frozenset[str]:
        return frozenset(a for a, _ in self.per_attr)

    def condition_for(self, attr: str):
        for a, c in self.per_attr:
            if a == attr:
                return c
        return None


def decompose_independent(g) -> IndependentCondition:
    """Split into per-attribute conjuncts, or raise NotIndependent."""
    if g is None:
        return IndependentCondition(())
    clauses = to_cnf(g)
    grouped: dict[str, list] = {}
    for clause in clauses:
        attrs = set()
        for atom in clause:
            if isinstance(atom, AttrAtom):
                raise NotIndependent(
                    f"atom compares two attributes: {atom.left} {atom.op} {atom.right}",
                    clause=clause,
                )
            attrs.add(atom.attr)
        if len(attrs) != 1:
            raise NotIndependent(
                f"clause mentions attributes {sorted(attrs)}", clause=clause
            )
        grouped.setdefault(attrs.pop(), []).append(clause)

    per_attr = []
    for attr in sorted(grouped):
        conj = tuple(c[0] if len(c) == 1 else Or(tuple(c)) for c in grouped[attr])
        per_attr.append((attr, conj[0] if len(conj) == 1 else And(conj)))
    return IndependentCondition(tuple(per_attr))


def sat_per_attribute(c, chase, attr: str | None = None) -> frozenset:
    """Values of the active domain satisfying a single-attribute condition."""
    attrs = cond_schema(c)
    if attr is None:
        if len(attrs) != 1:
            raise NotIndependent(f"expected one attribute, got {sorted(attrs)}")
        attr = next(iter(attrs))
    elif not attrs <= {attr}:
        raise NotIndependent(f"condition mentions {sorted(attrs)}, not only {attr}")
    out = set()
    for v in chase.adom.get(attr, ()):
        if eval_condition(c, _single(attr, v)):
            out.add(v)
    return frozenset(out)


def sat_sets(ic: IndependentCondition, chase) -> dict[str, frozenset]:
    return {a: sat_per_attribute(c, chase, a) for a, c in ic.per_attr}


def _single(attr, v):
    from .model import Tup

    return Tup({attr: v})
