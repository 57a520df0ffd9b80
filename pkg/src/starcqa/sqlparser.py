"""Mini-SQL front end for the query surface.

Grammar (keywords case-insensitive, identifiers case-sensitive):

    SELECT item ("," item)* FROM name [WHERE cond]
        [GROUP BY attr ("," attr)*] [HAVING hatom (AND hatom)*]
    item  := attr | AGG "(" measure ")" | COUNT "(" "*" ")"
           | COUNT "(" DISTINCT measure ")"        AGG in MIN MAX COUNT SUM
    cond  := disjunctions/conjunctions/NOT over atoms
    atom  := attr op (number | 'string' | attr)    op in = <> < <= > >=
    hatom := AGG "(" measure ")" hop number        hop in < <= > >=

Statements round-trip through ``print_statement``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .analytics import AGGREGATE_OPS, Aggregate, AnalyticQuery, HavingConjunct
from .conditions import And, Atom, AttrAtom, Not, Or
from .errors import QuerySyntaxError, UnknownAttribute, UnsupportedAggregate
from .model import StarSchemaDef
from .query import StandardQuery

KEYWORDS = {
    "select", "from", "where", "group", "by", "having",
    "and", "or", "not", "distinct",
}
AGG_WORDS = {"min", "max", "count", "sum"}
REJECTED_AGGS = {"avg", "average", "median", "stddev", "variance", "percentile"}

_TOKEN = re.compile(
    r"""\s*(?:
        (?P<number>-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<string>'(?:[^']|'')*')
      | (?P<sym><=|>=|<>|[(),*=<>])
    )""",
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # number | ident | string | sym | end
    value: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise QuerySyntaxError(f"unexpected character {rest[0]!r}", len(text) - len(rest))
        for kind in ("number", "ident", "string", "sym"):
            v = m.group(kind)
            if v is not None:
                out.append(Token(kind, v, m.start(kind)))
                break
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


@dataclass(frozen=True)
class ParsedStatement:
    query: object  # StandardQuery | AnalyticQuery
    source: str


class _Parser:
    def __init__(self, text: str, schema: StarSchemaDef | None):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.schema = schema
        self.types = schema.attr_types if schema else None

    # token helpers ----------------------------------------------------
    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def at_keyword(self, word: str) -> bool:
        t = self.peek()
        return t.kind == "ident" and t.value.lower() == word

    def expect_keyword(self, word: str) -> Token:
        if not self.at_keyword(word):
            t = self.peek()
            raise QuerySyntaxError(f"expected {word.upper()}, found {t.value!r}", t.pos)
        return self.next()

    def expect_sym(self, sym: str) -> Token:
        t = self.peek()
        if t.kind != "sym" or t.value != sym:
            raise QuerySyntaxError(f"expected {sym!r}, found {t.value!r}", t.pos)
        return self.next()

    def ident(self) -> Token:
        t = self.peek()
        if t.kind != "ident" or t.value.lower() in KEYWORDS:
            raise QuerySyntaxError(f"expected identifier, found {t.value!r}", t.pos)
        return self.next()

    # attribute / value validation --------------------------------------
    def attribute(self) -> str:
        t = self.ident()
        if self.types is not None and t.value not in self.types:
            raise UnknownAttribute(f"unknown attribute {t.value!r}")
        return t.value

    def measure(self, op: str) -> str:
        t = self.ident()
        if self.schema is not None:
            if t.value not in self.schema.attr_types:
                raise UnknownAttribute(f"unknown attribute {t.value!r}")
            if t.value not in self.schema.measure_set:
                raise UnsupportedAggregate(f"{op} aggregates measures, {t.value!r} is not one")
            if op == "sum" and self.schema.attr_types[t.value] == "text":
                raise UnsupportedAggregate(f"sum over text measure {t.value!r}")
        return t.value

    def literal(self, attr: str) -> object:
        t = self.peek()
        if t.kind == "number":
            self.next()
            value = float(t.value) if ("." in t.value or "e" in t.value.lower()) else int(t.value)
            if self.types is not None:
                declared = self.types[attr]
                if declared == "text":
                    raise QuerySyntaxError(f"numeric literal against text attribute {attr}", t.pos)
                if declared == "float":
                    value = float(value)
            return value
        if t.kind == "string":
            self.next()
            if self.types is not None and self.types[attr] != "text":
                raise QuerySyntaxError(f"string literal against {self.types[attr]} attribute {attr}", t.pos)
            return t.value[1:-1].replace("''", "'")
        raise QuerySyntaxError(f"expected a literal, found {t.value!r}", t.pos)

    # grammar ------------------------------------------------------------
    def parse(self) -> ParsedStatement:
        self.expect_keyword("select")
        attrs: list[str] = []
        aggs: list[Aggregate] = []
        while True:
            self.item(attrs, aggs)
            if self.peek().kind == "sym" and self.peek().value == ",":
                self.next()
                continue
            break
        self.expect_keyword("from")
        self.ident()  # table name: validated, semantically ignored
        cond = None
        if self.at_keyword("where"):
            self.next()
            cond = self.condition()
        group_by: tuple[str, ...] = ()
        if self.at_keyword("group"):
            self.next()
            self.expect_keyword("by")
            gattrs = [self.attribute()]
            while self.peek().kind == "sym" and self.peek().value == ",":
                self.next()
                gattrs.append(self.attribute())
            group_by = tuple(gattrs)
        having: tuple[HavingConjunct, ...] = ()
        if self.at_keyword("having"):
            tok = self.next()
            if not group_by:
                raise QuerySyntaxError("HAVING requires GROUP BY", tok.pos)
            having = self.having_clause()
        t = self.peek()
        if t.kind != "end":
            raise QuerySyntaxError(f"unexpected trailing input {t.value!r}", t.pos)

        if len(aggs) > 1:
            raise QuerySyntaxError("only one aggregate per query", 0)
        if aggs:
            if set(attrs) != set(group_by):
                raise QuerySyntaxError(
                    "selected attributes must match the GROUP BY attributes", 0
                )
            q = AnalyticQuery(aggs[0], cond, group_by, having)
        else:
            if having or group_by:
                raise QuerySyntaxError("GROUP BY needs an aggregate in the select list", 0)
            if not attrs:
                raise QuerySyntaxError("empty select list", 0)
            q = StandardQuery(frozenset(attrs), cond)
        return ParsedStatement(q, self.text)

    def item(self, attrs: list, aggs: list):
        t = self.peek()
        if t.kind != "ident":
            raise QuerySyntaxError(f"expected a select item, found {t.value!r}", t.pos)
        word = t.value.lower()
        nxt = self.tokens[self.i + 1]
        is_call = nxt.kind == "sym" and nxt.value == "("
        if is_call and word in REJECTED_AGGS:
            raise UnsupportedAggregate(f"aggregate {t.value} is not supported")
        if is_call and word not in AGG_WORDS:
            raise UnsupportedAggregate(f"unknown aggregate {t.value}")
        if not is_call:
            attrs.append(self.attribute())
            return
        self.next()  # aggregate word
        self.expect_sym("(")
        if word == "count" and self.peek().kind == "sym" and self.peek().value == "*":
            self.next()
            self.expect_sym(")")
            aggs.append(Aggregate("count", None, star=True))
            return
        distinct = False
        if self.at_keyword("distinct"):
            if word != "count":
                raise QuerySyntaxError("DISTINCT only with COUNT", self.peek().pos)
            self.next()
            distinct = True
        m = self.measure(word)
        self.expect_sym(")")
        aggs.append(Aggregate(word, m, distinct=distinct))

    def condition(self):
        return self.or_expr()

    def or_expr(self):
        parts = [self.and_expr()]
        while self.at_keyword("or"):
            self.next()
            parts.append(self.and_expr())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def and_expr(self):
        parts = [self.unary()]
        while self.at_keyword("and"):
            self.next()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self):
        if self.at_keyword("not"):
            self.next()
            return Not(self.unary())
        t = self.peek()
        if t.kind == "sym" and t.value == "(":
            self.next()
            inner = self.condition()
            self.expect_sym(")")
            return inner
        return self.atom()

    def atom(self):
        attr = self.attribute()
        t = self.peek()
        if t.kind != "sym" or t.value not in ("=", "<>", "<", "<=", ">", ">="):
            raise QuerySyntaxError(f"expected a comparison operator, found {t.value!r}", t.pos)
        self.next()
        op = "!=" if t.value == "<>" else t.value
        rhs = self.peek()
        if rhs.kind == "ident" and rhs.value.lower() not in KEYWORDS:
            other = self.attribute()
            if self.types is not None:
                lt, rt = self.types[attr], self.types[other]
                if (lt == "text") != (rt == "text"):
                    raise QuerySyntaxError(
                        f"attributes {attr} and {other} are not comparable", rhs.pos
                    )
            return AttrAtom(attr, op, other)
        return Atom(attr, op, self.literal(attr))

    def having_clause(self) -> tuple[HavingConjunct, ...]:
        atoms: list[tuple[str, str, str, object]] = []  # (op, measure, theta, bound)
        while True:
            t = self.ident()
            word = t.value.lower()
            if word in REJECTED_AGGS:
                raise UnsupportedAggregate(f"aggregate {t.value} is not supported")
            if word not in AGG_WORDS:
                raise QuerySyntaxError(f"expected an aggregate, found {t.value!r}", t.pos)
            self.expect_sym("(")
            m = self.measure(word)
            self.expect_sym(")")
            op_tok = self.peek()
            if op_tok.kind != "sym" or op_tok.value not in ("<", "<=", ">", ">="):
                raise QuerySyntaxError(
                    f"having comparisons use < <= > >=, found {op_tok.value!r}", op_tok.pos
                )
            self.next()
            num = self.peek()
            if num.kind != "number":
                raise QuerySyntaxError(f"expected a number, found {num.value!r}", num.pos)
            self.next()
            bound = float(num.value) if ("." in num.value or "e" in num.value.lower()) else int(num.value)
            atoms.append((word, m, op_tok.value, bound))
            if self.at_keyword("and"):
                self.next()
                continue
            break
        grouped: dict[tuple[str, str], list] = {}
        for op, m, theta, bound in atoms:
            grouped.setdefault((op, m), []).append((theta, bound))
        return tuple(
            HavingConjunct(op, m, tuple(pairs)) for (op, m), pairs in sorted(grouped.items())
        )


def parse_query(text: str, schema: StarSchemaDef | None = None) -> ParsedStatement:
    return _Parser(text, schema).parse()


def _print_value(v) -> str:
    if isinstance(v, str):
        return "'" + v.replace("'", "''") + "'"
    return repr(v)


def print_condition(g) -> str:
    if isinstance(g, Atom):
        op = "<>" if g.op == "!=" else g.op
        return f"{g.attr} {op} {_print_value(g.value)}"
    if isinstance(g, AttrAtom):
        op = "<>" if g.op == "!=" else g.op
        return f"{g.left} {op} {g.right}"
    if isinstance(g, Not):
        return f"NOT ({print_condition(g.child)})"
    if isinstance(g, And):
        return "(" + " AND ".join(print_condition(c) for c in g.children) + ")"
    if isinstance(g, Or):
        return "(" + " OR ".join(print_condition(c) for c in g.children) + ")"
    raise TypeError(f"not a condition: {g!r}")


def print_statement(ps_or_query) -> str:
    q = ps_or_query.query if isinstance(ps_or_query, ParsedStatement) else ps_or_query
    if isinstance(q, StandardQuery):
        items = sorted(q.projection)
        text = "SELECT " + ", ".join(items) + " FROM T"
        if q.condition is not None:
            text += " WHERE " + print_condition(q.condition)
        return text
    agg = q.aggregate
    if agg.star:
        agg_text = "COUNT(*)"
    elif agg.distinct:
        agg_text = f"COUNT(DISTINCT {agg.measure})"
    else:
        agg_text = f"{agg.op.upper()}({agg.measure})"
    items = list(q.group_by) + [agg_text]
    text = "SELECT " + ", ".join(items) + " FROM T"
    if q.condition is not None:
        text += " WHERE " + print_condition(q.condition)
    if q.group_by:
        text += " GROUP BY " + ", ".join(q.group_by)
    if q.having:
        parts = []
        for c in q.having:
            for theta, bound in c.atoms:
                parts.append(f"{c.op.upper()}({c.measure}) {theta} {repr(bound)}")
        text += " HAVING " + " AND ".join(parts)
    return text
