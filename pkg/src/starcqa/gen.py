"""Random valid warehouses and queries for property tests and the gen command.

Generation is seeded and deterministic.  Dimension tables get duplicate
keys with differing attribute values (FD violations), missing cells,
and keys absent from the fact table; the fact table gets duplicate key
combinations with differing measures and keys missing from dimensions.
The warehouse always satisfies the two input restrictions.
"""

from __future__ import annotations

import random

from .chase import m_chase_star
from .conditions import And, Atom, Or
from .model import DimensionDef, StarSchemaDef, Tup, Warehouse
from .repairs import repair_space_size


def random_schema(rng: random.Random, max_dims=3, max_non_keys=2, max_measures=2,
                  measure_fds=True) -> StarSchemaDef:
    dims = []
    n_dims = rng.randint(1, max_dims)
    for i in range(1, n_dims + 1):
        n_attrs = rng.randint(1, max_non_keys)
        non_keys = tuple((f"A{i}_{j}", rng.choice(("text", "int"))) for j in range(1, n_attrs + 1))
        dims.append(DimensionDef(f"D{i}", f"K{i}", "text", non_keys))
    measures = tuple((f"M{j}", "int") for j in range(1, rng.randint(1, max_measures) + 1))
    return StarSchemaDef(tuple(dims), measures, measure_fds)


def _attr_value(rng: random.Random, attr: str, ty: str, allow_negative: bool):
    if ty == "int":
        lo = -10 if allow_negative else 0
        return rng.randint(lo, 20)
    return f"{attr.lower()}v{rng.randint(0, 3)}"


def random_warehouse(rng: random.Random, max_dims=3, max_non_keys=2, max_measures=2,
                     max_rows=8, measure_fds=True, missing_rate=0.15,
                     allow_negative=False, repair_space_cap=1024,
                     schema: StarSchemaDef | None = None) -> Warehouse:
    """A random warehouse whose repair space fits under the cap."""
    for _ in range(200):
        sch = schema or random_schema(rng, max_dims, max_non_keys, max_measures, measure_fds)
        key_pools = {d.key: [f"{d.key.lower()}_{n}" for n in range(max(2, max_rows // 2))]
                     for d in sch.dimensions}
        dim_tables = []
        for d in sch.dimensions:
            rows = []
            for _ in range(rng.randint(1, max_rows)):
                bindings = {d.key: rng.choice(key_pools[d.key])}
                present = [a for a, _ in d.non_keys if rng.random() > missing_rate]
                if not present:
                    present = [rng.choice(d.non_keys)[0]]
                types = dict(d.non_keys)
                for a in present:
                    bindings[a] = _attr_value(rng, a, types[a], allow_negative)
                rows.append(Tup(bindings))
            dim_tables.append(rows)
        fact = []
        for _ in range(rng.randint(1, max_rows)):
            bindings = {}
            for d in sch.dimensions:
                # occasionally a key value the dimension table does not hold
                pool = key_pools[d.key] + [f"{d.key.lower()}_x"]
                bindings[d.key] = rng.choice(pool)
            present = [m for m in sch.measure_names if rng.random() > missing_rate]
            if not present:
                present = [rng.choice(sch.measure_names)]
            for m in present:
                bindings[m] = _attr_value(rng, m, "int", allow_negative)
            fact.append(Tup(bindings))
        w = Warehouse(sch, dim_tables, fact)
        if repair_space_size(m_chase_star(w)) <= repair_space_cap:
            return w
    raise RuntimeError("could not generate a warehouse under the repair-space cap")


def _random_single_attr_condition(rng: random.Random, attr: str, pool):
    ops = ("=", "!=", "<", "<=", ">", ">=")
    atoms = tuple(
        Atom(attr, rng.choice(ops), rng.choice(pool)) for _ in range(rng.randint(1, 2))
    )
    return atoms[0] if len(atoms) == 1 else Or(atoms)


def random_independent_condition(rng: random.Random, adom: dict, attrs) -> object:
    """A conjunction of per-attribute disjunctions: independent by shape."""
    chosen = rng.sample(list(attrs), k=min(len(attrs), rng.randint(1, 2)))
    parts = []
    for a in chosen:
        pool = list(adom.get(a, ())) or ["missing"]
        parts.append(_random_single_attr_condition(rng, a, pool))
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def random_nonindependent_condition(rng: random.Random, adom: dict, attrs) -> object:
    """An OR mixing two attributes inside one clause."""
    a, b = rng.sample(list(attrs), k=2)
    pa = list(adom.get(a, ())) or ["missing"]
    pb = list(adom.get(b, ())) or ["missing"]
    left = Atom(a, rng.choice(("=", "<", ">=")), rng.choice(pa))
    right = Atom(b, rng.choice(("=", "<=", ">")), rng.choice(pb))
    return Or((left, And((Atom(a, "=", rng.choice(pa)), right))))


def warehouse_to_files(w: Warehouse, options=None) -> dict[str, str]:
    """CSV/manifest text for a warehouse; keys are file names."""
    import json

    sch = w.schema
    files = {}
    manifest = {
        "dimensions": [
            {
                "name": d.name,
                "key": d.key,
                "key_type": d.key_type,
                "file": f"{d.name.lower()}.csv",
                "attributes": [{"name": a, "type": t} for a, t in d.non_keys],
            }
            for d in sch.dimensions
        ],
        "fact": {
            "file": "fact.csv",
            "measures": [{"name": m, "type": t} for m, t in sch.measures],
        },
        "options": {"measure_fds": sch.measure_fds, **(options or {})},
    }
    files["manifest.json"] = json.dumps(manifest, indent=2) + "\n"

    def csv_text(columns, rows):
        def cell(t, a):
            if a not in t:
                return ""
            v = t[a]
            s = str(v) if not isinstance(v, float) else repr(v)
            if "," in s or '"' in s or "\n" in s:
                s = '"' + s.replace('"', '""') + '"'
            return s

        lines = [",".join(columns)]
        for t in rows:
            lines.append(",".join(cell(t, a) for a in columns))
        return "\n".join(lines) + "\n"

    for d, rows in zip(sch.dimensions, w.dim_tables):
        files[f"{d.name.lower()}.csv"] = csv_text(d.attrs, rows)
    files["fact.csv"] = csv_text(sch.fact_schema, w.fact_table)
    return files
