"""Offline-first shopping list: embedded store, SQL subset, sync engine."""

from .appcore import Category, Product, ShopListApp, ShopListEntry, ShopListItem
from .store import (
    ConnectionSpec,
    DEFAULT_SCHEMA,
    ColumnDef,
    Store,
    TableDef,
    create_store,
    default_store_path,
    open_store,
    parse_connection_string,
)
from .sync import (
    ChangeRecord,
    ChangeTracker,
    Conflict,
    MergeReport,
    PushError,
    merge_exchange,
    rda_pull,
    rda_push,
    rda_submit_sql,
)

__all__ = [
    "Category",
    "ChangeRecord",
    "ChangeTracker",
    "ColumnDef",
    "Conflict",
    "ConnectionSpec",
    "DEFAULT_SCHEMA",
    "MergeReport",
    "Product",
    "PushError",
    "ShopListApp",
    "ShopListEntry",
    "ShopListItem",
    "Store",
    "TableDef",
    "create_store",
    "default_store_path",
    "merge_exchange",
    "open_store",
    "parse_connection_string",
    "rda_pull",
    "rda_push",
    "rda_submit_sql",
]

__version__ = "0.1.0"
