"""Exception hierarchy. Every user-facing error carries a stable code."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all errors raised by this package."""

    code = "engine-error"


class AttributeNotDefined(EngineError):
    code = "attribute-not-defined"


class InvalidWarehouse(EngineError):
    """A warehouse violating the missing-value restrictions was used."""

    code = "invalid-warehouse"

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations[:5])
        more = "" if len(self.violations) <= 5 else f" (+{len(self.violations) - 5} more)"
        super().__init__(f"warehouse violates input restrictions: {lines}{more}")


class NonStarFDs(EngineError):
    """FD set is cyclic or not normalized."""

    code = "non-star-fds"


class EnumerationTooLarge(EngineError):
    code = "enumeration-too-large"


class RepairSpaceTooLarge(EngineError):
    code = "repair-space-too-large"


class InvalidChoice(EngineError):
    code = "invalid-choice"


class TrueSetTooLarge(EngineError):
    code = "true-set-too-large"


class NotIndependent(EngineError):
    """Selection condition could not be split into per-attribute conjuncts.

    ``clause`` holds the offending CNF clause (or a size diagnostic) so
    callers can surface why the exact path was refused.
    """

    code = "not-independent"

    def __init__(self, message, clause=None):
        super().__init__(message)
        self.clause = clause


class UnsupportedHaving(EngineError):
    code = "unsupported-having"


class QuerySyntaxError(EngineError):
    code = "query-syntax-error"

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownAttribute(EngineError):
    code = "unknown-attribute"


class UnsupportedAggregate(EngineError):
    code = "unsupported-aggregate"


class ManifestError(EngineError):
    code = "manifest-error"


class CsvError(EngineError):
    code = "csv-error"

    def __init__(self, message, row=None, column=None):
        detail = ""
        if row is not None:
            detail += f" row {row}"
        if column is not None:
            detail += f" column {column!r}"
        super().__init__(f"{message}{detail}")
        self.row = row
        self.column = column


class ValueTypeError(EngineError):
    code = "value-type-error"

    def __init__(self, value, expected):
        super().__init__(f"value {value!r} does not have type {expected!r}")
        self.value = value
        self.expected = expected


class RestrictionViolation(EngineError):
    code = "restriction-violation"
