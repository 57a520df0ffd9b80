"""Manifest and table ingestion.

A warehouse is described by a JSON manifest naming the dimensions (key
plus typed attributes), the fact measures, per-table CSV files and
options.  CSV cells are typed by the manifest; an empty cell is a
missing value.  Loading is deterministic: identical files produce
identical in-memory warehouses.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass

from .errors import CsvError, ManifestError, RestrictionViolation, ValueTypeError
from .model import (
    VALUE_TYPES,
    DimensionDef,
    StarSchemaDef,
    Tup,
    Warehouse,
    validate_warehouse,
)

DEFAULT_OPTIONS = {
    "measure_fds": True,
    "repair_limit": 10_000,
    "enumeration_cap": 1_000_000,
}


@dataclass(frozen=True)
class Manifest:
    schema: StarSchemaDef
    table_files: dict[str, str]  # table name -> path
    options: dict


def parse_value(cell: str, declared: str):
    if declared == "text":
        return cell
    try:
        if declared == "int":
            return int(cell, 10)
        value = float(cell)
    except ValueError:
        raise ValueTypeError(cell, declared) from None
    if value != value or value in (float("inf"), float("-inf")):
        raise ValueTypeError(cell, declared)
    return value


def _typed_attrs(raw, where):
    out = []
    if not isinstance(raw, list):
        raise ManifestError(f"{where} must be a list")
    for item in raw:
        if not isinstance(item, dict) or "name" not in item or "type" not in item:
            raise ManifestError(f"{where} entries need name and type")
        name, ty = item["name"], item["type"]
        if not isinstance(name, str) or not name:
            raise ManifestError(f"bad attribute name in {where}")
        if ty not in VALUE_TYPES:
            raise ManifestError(f"bad type {ty!r} for {name} (one of {VALUE_TYPES})")
        out.append((name, ty))
    return tuple(out)


def parse_manifest(text: str, base_dir: str = ".") -> Manifest:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ManifestError(f"manifest is not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ManifestError("manifest must be a JSON object")
    dims_raw = doc.get("dimensions")
    fact_raw = doc.get("fact")
    if not isinstance(dims_raw, list) or not dims_raw:
        raise ManifestError("manifest needs a nonempty dimensions list")
    if not isinstance(fact_raw, dict):
        raise ManifestError("manifest needs a fact object")

    dims = []
    files = {}
    for d in dims_raw:
        if not isinstance(d, dict):
            raise ManifestError("each dimension must be an object")
        for key in ("name", "key", "file"):
            if not isinstance(d.get(key), str) or not d[key]:
                raise ManifestError(f"dimension needs a {key} string")
        key_type = d.get("key_type", "text")
        if key_type not in VALUE_TYPES:
            raise ManifestError(f"bad key_type {key_type!r}")
        non_keys = _typed_attrs(d.get("attributes", []), f"dimension {d['name']} attributes")
        if not non_keys:
            raise ManifestError(f"dimension {d['name']} needs at least one attribute")
        dims.append(DimensionDef(d["name"], d["key"], key_type, non_keys))
        files[d["name"]] = os.path.join(base_dir, d["file"])
    if not isinstance(fact_raw.get("file"), str):
        raise ManifestError("fact needs a file string")
    measures = _typed_attrs(fact_raw.get("measures", []), "fact measures")
    if not measures:
        raise ManifestError("fact needs at least one measure")
    files["fact"] = os.path.join(base_dir, fact_raw["file"])

    options = dict(DEFAULT_OPTIONS)
    raw_opts = doc.get("options", {})
    if not isinstance(raw_opts, dict):
        raise ManifestError("options must be an object")
    for k, v in raw_opts.items():
        if k not in DEFAULT_OPTIONS:
            raise ManifestError(f"unknown option {k!r}")
        if k == "measure_fds":
            if not isinstance(v, bool):
                raise ManifestError("measure_fds must be a boolean")
        elif not isinstance(v, int) or isinstance(v, bool) or v <= 0:
            raise ManifestError(f"option {k} must be a positive integer")
        options[k] = v

    try:
        schema = StarSchemaDef(tuple(dims), measures, options["measure_fds"])
    except ValueError as e:
        raise ManifestError(str(e)) from None
    return Manifest(schema, files, options)


def parse_table(text: str, columns: dict[str, str], table: str) -> tuple[Tup, ...]:
    """Parse one CSV table; ``columns`` maps attribute name to type."""
    try:
        reader = csv.reader(io.StringIO(text))
        rows = list(reader)
    except csv.Error as e:
        raise CsvError(f"{table}: {e}") from None
    if not rows:
        raise CsvError(f"{table}: missing header row")
    header = rows[0]
    if len(set(header)) != len(header):
        raise CsvError(f"{table}: duplicate column in header")
    if set(header) != set(columns):
        raise CsvError(
            f"{table}: header {header} does not match declared attributes {sorted(columns)}"
        )
    out = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise CsvError(f"{table}: wrong number of cells", row=i)
        bindings = {}
        for col, cell in zip(header, row):
            if cell == "":
                continue  # missing value
            try:
                bindings[col] = parse_value(cell, columns[col])
            except ValueTypeError as e:
                raise CsvError(f"{table}: {e}", row=i, column=col) from None
        out.append(Tup(bindings))
    return tuple(out)


def load_warehouse_from_strings(manifest_text: str, tables: dict[str, str]) -> tuple[Warehouse, dict]:
    """In-memory variant: ``tables`` maps table name to CSV text."""
    m = parse_manifest(manifest_text)
    dim_tables = []
    for d in m.schema.dimensions:
        if d.name not in tables:
            raise ManifestError(f"missing table data for dimension {d.name}")
        cols = {d.key: d.key_type, **dict(d.non_keys)}
        dim_tables.append(parse_table(tables[d.name], cols, d.name))
    if "fact" not in tables:
        raise ManifestError("missing table data for fact")
    fact_cols = {k: t for k, t in zip(m.schema.key_attrs, (d.key_type for d in m.schema.dimensions))}
    fact_cols.update(dict(m.schema.measures))
    fact = parse_table(tables["fact"], fact_cols, "fact")
    w = Warehouse(m.schema, dim_tables, fact)
    violations = validate_warehouse(w)
    if violations:
        raise RestrictionViolation(
            "; ".join(str(v) for v in violations[:5])
            + ("" if len(violations) <= 5 else f" (+{len(violations) - 5} more)")
        )
    return w, m.options


def load_warehouse(manifest_path: str) -> Warehouse:
    w, _ = load_warehouse_with_options(manifest_path)
    return w


def load_warehouse_with_options(manifest_path: str) -> tuple[Warehouse, dict]:
    try:
        with open(manifest_path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ManifestError(f"cannot read manifest: {e}") from None
    m = parse_manifest(text, os.path.dirname(os.path.abspath(manifest_path)))
    tables = {}
    for name, path in m.table_files.items():
        try:
            with open(path, encoding="utf-8") as fh:
                tables[name] = fh.read()
        except OSError as e:
            raise ManifestError(f"cannot read table file for {name}: {e}") from None
    return load_warehouse_from_strings(text, tables)
