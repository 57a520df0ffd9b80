"""Core data model: tuples, m-tuples, star schemas, warehouses.

Tuples are partial maps from attribute names to values; a missing
attribute is simply absent, no sentinel participates in comparisons or
active domains.  M-tuples map each attribute to a finite set of
candidate values and are the working unit of the chase.  All types here
are immutable after construction and safe to share.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import AttributeNotDefined, InvalidWarehouse

VALUE_TYPES = ("int", "float", "text")


def check_value_type(value, declared: str) -> bool:
    if declared == "int":
        return isinstance(value, int) and not isinstance(value, bool)
    if declared == "float":
        return isinstance(value, float)
    if declared == "text":
        return isinstance(value, str)
    return False


def _valid_value(v):
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise TypeError(f"unsupported value {v!r}")
    return v


class Tup:
    """An immutable tuple: a partial map attribute -> value.

    The empty tuple is allowed; it is the single element of the empty
    cross product used by ``enumerate_tuples(sigma, frozenset())``.
    """

    __slots__ = ("_d", "_key", "_hash")

    def __init__(self, bindings=()):
        d = dict(bindings)
        for a, v in d.items():
            if not isinstance(a, str):
                raise TypeError("attribute names must be strings")
            _valid_value(v)
        self._d = d
        self._key = tuple(sorted(d.items()))
        self._hash = hash(self._key)

    @property
    def schema(self) -> frozenset[str]:
        return frozenset(self._d)

    def attrs(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self._key)

    def items(self):
        return self._key

    def as_dict(self) -> dict:
        return dict(self._d)

    def __getitem__(self, attr: str):
        try:
            return self._d[attr]
        except KeyError:
            raise AttributeNotDefined(f"attribute {attr!r} not defined on tuple") from None

    def get(self, attr: str, default=None):
        return self._d.get(attr, default)

    def __contains__(self, attr: str) -> bool:
        return attr in self._d

    def __len__(self) -> int:
        return len(self._d)

    def restrict(self, attrs) -> "Tup":
        s = set(attrs)
        if not s <= set(self._d):
            missing = sorted(s - set(self._d))
            raise AttributeNotDefined(f"attributes {missing} not defined on tuple")
        return Tup({a: self._d[a] for a in s})

    def merge(self, other: "Tup") -> "Tup | None":
        """Concatenation x-gamma; None when the shared attributes disagree."""
        d = dict(self._d)
        for a, v in other.items():
            if a in d and d[a] != v:
                return None
            d[a] = v
        return Tup(d)

    def __eq__(self, other):
        return isinstance(other, Tup) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        inner = ", ".join(f"{a}={v!r}" for a, v in self._key)
        return f"Tup({inner})"


class MTuple:
    """A multi-valued tuple: attribute -> nonempty sorted set of values."""

    __slots__ = ("_c", "_key", "_hash")

    def __init__(self, components=()):
        c = {}
        for a, vals in dict(components).items():
            vs = tuple(sorted(set(vals)))
            if vs:
                for v in vs:
                    _valid_value(v)
                c[a] = vs
        self._c = c
        self._key = tuple(sorted(c.items()))
        self._hash = hash(self._key)

    @classmethod
    def from_tuple(cls, t: Tup) -> "MTuple":
        return cls({a: (v,) for a, v in t.items()})

    @property
    def schema(self) -> frozenset[str]:
        return frozenset(self._c)

    def component(self, attr: str) -> tuple:
        try:
            return self._c[attr]
        except KeyError:
            raise AttributeNotDefined(f"attribute {attr!r} not defined on m-tuple") from None

    def get(self, attr: str) -> tuple:
        return self._c.get(attr, ())

    def items(self):
        return self._key

    def __contains__(self, attr: str) -> bool:
        return attr in self._c

    def restrict(self, attrs) -> "MTuple":
        s = set(attrs)
        if not s <= set(self._c):
            missing = sorted(s - set(self._c))
            raise AttributeNotDefined(f"attributes {missing} not defined on m-tuple")
        return MTuple({a: self._c[a] for a in s})

    def tuple_count(self, attrs=None) -> int:
        attrs = self._c if attrs is None else attrs
        n = 1
        for a in attrs:
            n *= len(self.component(a))
        return n

    def __eq__(self, other):
        return isinstance(other, MTuple) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        inner = " ".join(f"{a}=({' '.join(map(repr, vs))})" for a, vs in self._key)
        return f"MTuple[{inner}]"


def restrict(t: Tup, attrs) -> Tup:
    return t.restrict(attrs)


def _lift(x) -> MTuple:
    return MTuple.from_tuple(x) if isinstance(x, Tup) else x


def subsumes(big, small) -> bool:
    """Component-wise inclusion: small ⊑ big.  Tuples are lifted."""
    b, s = _lift(big), _lift(small)
    for a, vs in s.items():
        if not set(vs) <= set(b.get(a)):
            return False
    return True


def m_union(s1: MTuple, s2: MTuple) -> MTuple:
    c = {a: set(vs) for a, vs in s1.items()}
    for a, vs in s2.items():
        c.setdefault(a, set()).update(vs)
    return MTuple(c)


def enumerate_tuples(sigma: MTuple, attrs=None) -> frozenset[Tup]:
    """Cross product of the components over ``attrs`` (default: full schema)."""
    names = sorted(sigma.schema) if attrs is None else sorted(set(attrs))
    comps = [sigma.component(a) for a in names]  # raises on undefined attrs
    out = set()
    for combo in itertools.product(*comps):
        out.add(Tup(zip(names, combo)))
    return frozenset(out)


def tuple_in_mtuple(t: Tup, sigma: MTuple) -> bool:
    """t ∈ tuples(sigma(sch(t))) without materializing the product."""
    for a, v in t.items():
        if v not in set(sigma.get(a)):
            return False
    return True


@dataclass(frozen=True)
class FD:
    lhs: frozenset[str]
    rhs: str

    def __repr__(self):
        return f"{''.join(sorted(self.lhs))}->{self.rhs}"


def fd(lhs, rhs: str) -> FD:
    if isinstance(lhs, str):
        lhs = (lhs,)
    return FD(frozenset(lhs), rhs)


@dataclass(frozen=True)
class DimensionDef:
    name: str
    key: str
    key_type: str
    non_keys: tuple[tuple[str, str], ...]  # (attribute, type)

    @property
    def attrs(self) -> tuple[str, ...]:
        return (self.key,) + tuple(a for a, _ in self.non_keys)


@dataclass(frozen=True)
class StarSchemaDef:
    """Star schema: dimensions with keyed attribute lists plus fact measures.

    The derived FD set is {Ki -> Ai_j for every dimension attribute} plus,
    when ``measure_fds`` is set, {K1..Kn -> Ml for every measure}.
    """

    dimensions: tuple[DimensionDef, ...]
    measures: tuple[tuple[str, str], ...]  # (attribute, type)
    measure_fds: bool = True

    def __post_init__(self):
        names = list(self.universe)
        if len(names) != len(set(names)):
            raise ValueError("attribute names must be globally distinct")
        for _, ty in self.measures:
            if ty not in VALUE_TYPES:
                raise ValueError(f"bad measure type {ty!r}")
        for d in self.dimensions:
            if d.key_type not in VALUE_TYPES:
                raise ValueError(f"bad key type {d.key_type!r}")
            for _, ty in d.non_keys:
                if ty not in VALUE_TYPES:
                    raise ValueError(f"bad attribute type {ty!r}")

    @property
    def universe(self) -> tuple[str, ...]:
        out = []
        for d in self.dimensions:
            out.extend(d.attrs)
        out.extend(a for a, _ in self.measures)
        return tuple(out)

    @property
    def key_attrs(self) -> tuple[str, ...]:
        return tuple(d.key for d in self.dimensions)

    @property
    def key_set(self) -> frozenset[str]:
        return frozenset(self.key_attrs)

    @property
    def measure_names(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.measures)

    @property
    def measure_set(self) -> frozenset[str]:
        return frozenset(self.measure_names)

    @property
    def fact_schema(self) -> tuple[str, ...]:
        return self.key_attrs + self.measure_names

    @property
    def attr_types(self) -> dict[str, str]:
        types = {}
        for d in self.dimensions:
            types[d.key] = d.key_type
            types.update(dict(d.non_keys))
        types.update(dict(self.measures))
        return types

    def dimension_of(self, attr: str) -> DimensionDef | None:
        for d in self.dimensions:
            if attr in d.attrs:
                return d
        return None

    def fds(self) -> tuple[FD, ...]:
        out = []
        for d in self.dimensions:
            for a, _ in d.non_keys:
                out.append(fd(d.key, a))
        if self.measure_fds:
            for m in self.measure_names:
                out.append(fd(self.key_attrs, m))
        return tuple(out)


@dataclass(frozen=True)
class Violation:
    table: str
    index: int
    restriction: str
    message: str

    def __str__(self):
        return f"{self.table}[{self.index}]: {self.message} ({self.restriction})"


def tuple_sort_key(t: Tup, universe) -> tuple:
    # missing attribute sorts before any present value
    return tuple((1, t[a]) if a in t else (0, None) for a in universe)


def mtuple_sort_key(sigma: MTuple, universe) -> tuple:
    return tuple((1, sigma.component(a)) if a in sigma else (0, ()) for a in universe)


def _sorted_rows(rows, universe):
    rows = set(rows)
    return tuple(sorted(rows, key=lambda t: tuple_sort_key(t, universe)))


class Warehouse:
    """A star-schema database: one table per dimension plus a fact table.

    Duplicate rows collapse (tables are sets).  Active domains are
    computed once at construction and cached.
    """

    def __init__(self, schema: StarSchemaDef, dim_tables, fact_table):
        if len(dim_tables) != len(schema.dimensions):
            raise ValueError("one table per dimension required")
        self.schema = schema
        u = schema.universe
        self.dim_tables = tuple(_sorted_rows(rows, u) for rows in dim_tables)
        self.fact_table = _sorted_rows(fact_table, u)
        self.adom = self._active_domains()

    def _active_domains(self) -> dict[str, tuple]:
        pools: dict[str, set] = {a: set() for a in self.schema.universe}
        for rows in (*self.dim_tables, self.fact_table):
            for t in rows:
                for a, v in t.items():
                    pools[a].add(v)
        return {a: tuple(sorted(vs)) for a, vs in pools.items()}

    @property
    def size(self) -> int:
        return sum(len(rows) for rows in self.dim_tables) + len(self.fact_table)

    def tables(self):
        for d, rows in zip(self.schema.dimensions, self.dim_tables):
            yield d.name, rows
        yield "fact", self.fact_table


def validate_warehouse(w: Warehouse) -> list[Violation]:
    """Check the two missing-value restrictions and declared value types.

    Returns structured violations instead of raising; an empty list
    means the warehouse is acceptable chase input.
    """
    out = []
    types = w.schema.attr_types

    def check_types(table, i, t, allowed):
        for a, v in t.items():
            if a not in allowed:
                out.append(Violation(table, i, "schema", f"attribute {a!r} not in table schema"))
            elif not check_value_type(v, types[a]):
                out.append(Violation(table, i, "type", f"{a}={v!r} is not of type {types[a]}"))

    for d, rows in zip(w.schema.dimensions, w.dim_tables):
        allowed = set(d.attrs)
        for i, t in enumerate(rows):
            check_types(d.name, i, t, allowed)
            if d.key not in t:
                out.append(Violation(d.name, i, "restriction-1", f"missing key {d.key}"))
            if not any(a in t for a, _ in d.non_keys):
                out.append(Violation(d.name, i, "restriction-1", "no non-key attribute defined"))
    keys = w.schema.key_attrs
    allowed = set(w.schema.fact_schema)
    for i, t in enumerate(w.fact_table):
        check_types("fact", i, t, allowed)
        missing = [k for k in keys if k not in t]
        if missing:
            out.append(Violation("fact", i, "restriction-2", f"missing key attributes {missing}"))
        if not any(m in t for m in w.schema.measure_names):
            out.append(Violation("fact", i, "restriction-2", "no measure defined"))
    return out


@dataclass(frozen=True)
class StarTable:
    """All warehouse tuples collected over the full universe."""

    universe: tuple[str, ...]
    rows: tuple[Tup, ...]

    def __len__(self):
        return len(self.rows)


def build_star_table(w: Warehouse) -> StarTable:
    violations = validate_warehouse(w)
    if violations:
        raise InvalidWarehouse(violations)
    rows = set()
    for _, table in w.tables():
        rows.update(table)
    return StarTable(w.schema.universe, _sorted_rows(rows, w.schema.universe))
