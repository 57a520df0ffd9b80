"""Consistent query answering over star-schema warehouses.

Builds the chased m-table of a warehouse with missing values and
FD violations, classifies tuples as true/conflicting/consistent,
enumerates repairs, and answers standard and aggregate queries with
certified consistent answers or sound bounds.
"""

__version__ = "0.1.0"

from .analytics import (
    Aggregate,
    AnalyticQuery,
    GroupedAnswer,
    HavingConjunct,
    IntervalAnswer,
    answer_analytic,
    cons_answer_groupby,
    cons_answer_having,
    cons_answer_no_groupby,
    count_distinct_bounds,
    sigma_sets,
)
from .chase import (
    ChaseResult,
    ChaseStats,
    chase_equivalence_check,
    m_chase_generic,
    m_chase_star,
    serialize_m_table,
)
from .classify import TupleStatus, classify, confl_min, cons_tuples_over
from .conditions import (
    And,
    Atom,
    AttrAtom,
    Not,
    Or,
    decompose_independent,
    eval_condition,
    sat_per_attribute,
)
from .errors import EngineError, NotIndependent
from .loader import load_warehouse, load_warehouse_from_strings, parse_manifest
from .model import (
    FD,
    DimensionDef,
    MTuple,
    StarSchemaDef,
    StarTable,
    Tup,
    Warehouse,
    build_star_table,
    enumerate_tuples,
    fd,
    m_union,
    restrict,
    subsumes,
    validate_warehouse,
)
from .oracle import (
    OracleReport,
    answer_in_repair_analytic,
    answer_in_repair_standard,
    oracle_consistent_answer,
    oracle_strong_answer,
)
from .query import (
    BoundedAnswer,
    StandardQuery,
    consistent_answer_bounds,
    consistent_answer_standard,
)
from .repairs import (
    ChoiceFunction,
    Repair,
    build_repair,
    enumerate_choice_functions,
    enumerate_repairs,
    verify_repair,
)
from .sqlparser import ParsedStatement, parse_query, print_statement
