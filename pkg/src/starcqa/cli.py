"""Command-line interface: chase, classify, repairs, query, gen.

Exit codes: 0 success, 1 user error (bad input, unsupported query),
2 internal invariant failure.  All output is deterministic for fixed
inputs.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import __version__
from .analytics import AnalyticQuery, GroupedAnswer, IntervalAnswer, answer_analytic
from .chase import chase_equivalence_check, m_chase_generic, m_chase_star, serialize_m_table
from .classify import classify
from .errors import EngineError, NotIndependent
from .gen import random_warehouse, warehouse_to_files
from .loader import load_warehouse_with_options, parse_value
from .model import Tup, build_star_table
from .oracle import oracle_consistent_answer, oracle_strong_answer
from .query import StandardQuery, consistent_answer_bounds, consistent_answer_standard
from .repairs import enumerate_repairs, repair_space_size
from .sqlparser import parse_query


def _print(args, text):
    if not args.quiet:
        print(text)


def _value_str(v):
    return repr(v) if isinstance(v, float) else str(v)


def _tuple_str(t: Tup, universe) -> str:
    return ",".join(f"{a}={_value_str(t[a])}" for a in universe if a in t)


def _tuples_sorted(ts, universe):
    from .model import tuple_sort_key

    return sorted(ts, key=lambda t: tuple_sort_key(t, universe))


def _json_value(v):
    return v


def _tuple_json(t: Tup):
    return {a: _json_value(v) for a, v in t.items()}


def _interval_json(ans: IntervalAnswer):
    if ans.kind == "null":
        return {"null": True}
    return {"glb": ans.glb, "lub": ans.lub, "exact": ans.exact}


def cmd_chase(args) -> int:
    w, _ = load_warehouse_with_options(args.manifest)
    if args.algo in ("star", "both"):
        res = m_chase_star(w)
    else:
        res = m_chase_generic(build_star_table(w), w.schema.fds(), schema=w.schema)
    if args.algo == "both":
        if not chase_equivalence_check(w):
            print("internal error: star and generic chase disagree", file=sys.stderr)
            return 2
        _print(args, "algorithms agree")
    text = serialize_m_table(res)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif not args.quiet:
        sys.stdout.write(text)
    if args.stats:
        s = res.stats
        print(
            f"m_tuple_count={s.m_tuple_count} delta={s.delta} "
            f"W={s.warehouse_size} elapsed={s.elapsed:.6f}s"
        )
    return 0


def _parse_cli_tuple(text: str, schema) -> Tup:
    types = schema.attr_types
    bindings = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise EngineError(f"tuple items look like Attr=value, got {part!r}")
        a, v = part.split("=", 1)
        a = a.strip()
        if a not in types:
            raise EngineError(f"unknown attribute {a!r}")
        bindings[a] = parse_value(v.strip(), types[a])
    if not bindings:
        raise EngineError("empty tuple")
    return Tup(bindings)


def cmd_classify(args) -> int:
    w, _ = load_warehouse_with_options(args.manifest)
    res = m_chase_star(w)
    t = _parse_cli_tuple(args.tuple, w.schema)
    print(classify(res, t).value)
    return 0


def cmd_repairs(args) -> int:
    w, opts = load_warehouse_with_options(args.manifest)
    res = m_chase_star(w)
    limit = args.limit or opts["repair_limit"]
    size = repair_space_size(res)
    print(f"repairs: {size}")
    if size > limit:
        print(f"(enumeration skipped: above limit {limit})", file=sys.stderr)
        return 1
    for i, r in enumerate(enumerate_repairs(res, limit), start=1):
        _print(args, f"repair {i}:")
        for t in r.anchor_rows:
            _print(args, "  " + _tuple_str(t, res.universe))
        if args.materialize_true_sets:
            from .classify import cons_tuples_over
            from .model import enumerate_tuples

            seen = set()
            for a in r.anchor_rows:
                sch = sorted(a.schema)
                for mask in range(1, 1 << len(sch)):
                    attrs = [sch[j] for j in range(len(sch)) if mask >> j & 1]
                    seen.add(a.restrict(attrs))
            for sigma in res.m_tuples:
                sch = sorted(sigma.schema)
                for mask in range(1, 1 << len(sch)):
                    attrs = frozenset(sch[j] for j in range(len(sch)) if mask >> j & 1)
                    pinned = [f for f in res.fds if f.lhs | {f.rhs} <= attrs]
                    if all(len(sigma.component(f.rhs)) == 1 for f in pinned):
                        seen.update(enumerate_tuples(sigma, attrs))
            _print(args, f"  true set: {len(seen)} tuples")
    return 0


def _format_standard(args, answer, universe):
    rows = _tuples_sorted(answer, universe)
    if args.format == "json":
        return json.dumps({"rows": [_tuple_json(t) for t in rows]}, ensure_ascii=False)
    return "\n".join(_tuple_str(t, universe) for t in rows)


def _format_analytic(args, answer, strong, universe):
    if isinstance(answer, IntervalAnswer):
        doc = _interval_json(answer)
        if strong is not None:
            doc["strong"] = strong
        if args.format == "json":
            return json.dumps(doc, ensure_ascii=False)
        if answer.kind == "null":
            return "NULL"
        return f"[{_value_str(answer.glb)}, {_value_str(answer.lub)}] exact={answer.exact}" + (
            f" strong={_value_str(strong)}" if strong is not None else ""
        )
    groups = []
    strong_map = dict(strong or ())
    for x, ans in answer.rows:
        entry = {"key": _tuple_json(x), **_interval_json(ans)}
        if x in strong_map:
            entry["strong"] = strong_map[x]
        groups.append(entry)
    if args.format == "json":
        return json.dumps({"groups": groups}, ensure_ascii=False)
    lines = []
    for x, ans in answer.rows:
        lines.append(
            f"{_tuple_str(x, universe)} -> [{_value_str(ans.glb)}, {_value_str(ans.lub)}]"
            f" exact={ans.exact}"
        )
    return "\n".join(lines) if lines else "(empty)"


def cmd_query(args) -> int:
    w, opts = load_warehouse_with_options(args.manifest)
    res = m_chase_star(w)
    ps = parse_query(args.sql, w.schema)
    q = ps.query
    if args.mode == "oracle":
        report = oracle_consistent_answer(res, q, limit=opts["repair_limit"])
        doc = {"per_repair": len(report.per_repair)}
        if isinstance(q, StandardQuery):
            doc["rows"] = [_tuple_json(t) for t in _tuples_sorted(report.combined, res.universe)]
        elif isinstance(report.combined, IntervalAnswer):
            doc["answer"] = _interval_json(report.combined)
            doc["strong"] = oracle_strong_answer(res, q, limit=opts["repair_limit"])
        else:
            doc["groups"] = [
                {"key": _tuple_json(x), **_interval_json(a)} for x, a in report.combined.rows
            ]
        print(json.dumps(doc, ensure_ascii=False))
        return 0
    if isinstance(q, StandardQuery):
        if args.mode == "bounds":
            b = consistent_answer_bounds(res, q)
            if args.format == "json":
                print(json.dumps({
                    "lower": [_tuple_json(t) for t in _tuples_sorted(b.lower, res.universe)],
                    "upper": [_tuple_json(t) for t in _tuples_sorted(b.upper, res.universe)],
                }, ensure_ascii=False))
            else:
                print("lower:")
                for t in _tuples_sorted(b.lower, res.universe):
                    print("  " + _tuple_str(t, res.universe))
                print("upper:")
                for t in _tuples_sorted(b.upper, res.universe):
                    print("  " + _tuple_str(t, res.universe))
            return 0
        try:
            answer = consistent_answer_standard(res, q)
        except NotIndependent as e:
            print(f"error[{e.code}]: {e}", file=sys.stderr)
            print("hint: the condition is not independent; use --mode bounds", file=sys.stderr)
            return 1
        print(_format_standard(args, answer, res.universe))
        return 0
    if args.mode == "bounds":
        print("bounds mode applies to standard queries only", file=sys.stderr)
        return 1
    try:
        answer, strong = answer_analytic(res, q)
    except NotIndependent as e:
        print(f"error[{e.code}]: {e}", file=sys.stderr)
        print("hint: the condition is not independent; analytic answers need one", file=sys.stderr)
        return 1
    print(_format_analytic(args, answer, strong, res.universe))
    return 0


def cmd_gen(args) -> int:
    import os

    rng = random.Random(args.seed)
    w = random_warehouse(
        rng,
        max_dims=args.dims,
        max_rows=args.rows,
        measure_fds=not args.no_measure_fds,
        allow_negative=args.allow_negative,
    )
    files = warehouse_to_files(w)
    os.makedirs(args.out, exist_ok=True)
    for name, text in sorted(files.items()):
        with open(os.path.join(args.out, name), "w", encoding="utf-8") as fh:
            fh.write(text)
    _print(args, f"wrote {len(files)} files to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="starcqa", description="Consistent query answering over star schemas")
    p.add_argument("--version", action="version", version=f"starcqa {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--quiet", action="store_true")

    sp = sub.add_parser("chase", help="compute the chased m-table")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--algo", choices=("star", "generic", "both"), default="star")
    sp.add_argument("--out")
    sp.add_argument("--stats", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_chase)

    sp = sub.add_parser("classify", help="classify one tuple")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--tuple", required=True, help='e.g. "K1=k1,A1_1=a1"')
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("repairs", help="enumerate repairs")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--limit", type=int)
    sp.add_argument("--materialize-true-sets", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_repairs)

    sp = sub.add_parser("query", help="answer a query")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--sql", required=True)
    sp.add_argument("--mode", choices=("exact", "bounds", "oracle"), default="exact")
    common(sp)
    sp.set_defaults(func=cmd_query)

    sp = sub.add_parser("gen", help="emit a random valid warehouse")
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--dims", type=int, default=2)
    sp.add_argument("--rows", type=int, default=6)
    sp.add_argument("--no-measure-fds", action="store_true")
    sp.add_argument("--allow-negative", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_gen)
    return p


def run_cli(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code else 0
    try:
        return args.func(args)
    except EngineError as e:
        print(f"error[{e.code}]: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # invariant failure
        print(f"internal error: {e!r}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))
