"""Exception hierarchy shared by every shoplist subsystem.

All domain failures derive from ShopListError so callers (CLI, server)
can map them to exit codes / HTTP statuses in one place.
"""


class ShopListError(Exception):
    """Base class for every domain error raised by this package."""


# --- store -----------------------------------------------------------------

class MalformedConnectionString(ShopListError):
    pass


class FileExists(ShopListError):
    pass


class IoFailure(ShopListError):
    pass


class BadMagic(ShopListError):
    pass


class UnsupportedVersion(ShopListError):
    pass


class BadPassword(ShopListError):
    pass


class HandleClosed(ShopListError):
    pass


class UnknownTable(ShopListError):
    pass


class UnknownColumn(ShopListError):
    pass


class TypeMismatch(ShopListError):
    pass


class NullViolation(ShopListError):
    pass


class ForeignKeyViolation(ShopListError):
    pass


# --- sqlcmd ----------------------------------------------------------------

class SqlSyntaxError(ShopListError):
    """Parse failure; carries the offset and what was expected there."""

    def __init__(self, position, expected, message=None):
        self.position = position
        self.expected = expected
        super().__init__(message or f"syntax error at {position}: expected {expected}")


class UnsupportedStatement(ShopListError):
    pass


class NotAQuery(ShopListError):
    pass


class ApplyError(ShopListError):
    """A row in a ResultSet batch failed; earlier rows stay applied."""

    def __init__(self, row_index, cause):
        self.row_index = row_index
        self.cause = cause
        super().__init__(f"row {row_index}: {cause}")


# --- appcore ---------------------------------------------------------------

class InvalidName(ShopListError):
    pass


class InvalidPrice(ShopListError):
    pass


class DuplicateCategory(ShopListError):
    pass


class UnknownCategory(ShopListError):
    pass


class UnknownProduct(ShopListError):
    pass


class UnknownItem(ShopListError):
    pass


class DuplicateListItem(ShopListError):
    pass


# --- sync ------------------------------------------------------------------

class TrackingDisabled(ShopListError):
    pass


class PendingChangesExist(ShopListError):
    pass


class NotTracked(ShopListError):
    pass


class SchemaMismatch(ShopListError):
    pass


class TransportFailure(ShopListError):
    pass


class TrackingModeConflict(ShopListError):
    """Merge and RDA tracking are mutually exclusive per table."""


class MalformedRequest(ShopListError):
    """A wire request body is missing fields or has the wrong shape."""


# --- diag ------------------------------------------------------------------

class NotStarted(ShopListError):
    pass
