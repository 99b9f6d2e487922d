"""Embedded single-file relational store.

One file ("ShopList.sdf" by default) holds a fixed 72-byte header, one
section per table (schema + row log + trailing committed-length field),
and a JSON sync-state section used by the sync tracker.  All integers are
little-endian.  The whole store is held in memory; flush/close rewrite the
file atomically (write temp, fsync, rename), which doubles as compaction.

Single writer: an exclusive flock on a sidecar lock file is held for the
lifetime of an open handle.
"""

from __future__ import annotations

import fcntl
import hashlib
import io
import json
import os
import struct
import time
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Any, Callable, Dict, List, Optional, Tuple

from .errors import (
    BadMagic,
    BadPassword,
    FileExists,
    ForeignKeyViolation,
    HandleClosed,
    IoFailure,
    MalformedConnectionString,
    NullViolation,
    TypeMismatch,
    UnknownColumn,
    UnknownTable,
    UnsupportedVersion,
)

MAGIC = b"SLDF"
FORMAT_VERSION = 1
DEFAULT_FILENAME = "ShopList.sdf"

KINDS = ("integer", "decimal", "text", "boolean", "timestamp")
DECIMAL_SCALE = 4  # fixed-point: prices kept exact as scaled 64-bit ints
_DECIMAL_QUANTUM = Decimal(1).scaleb(-DECIMAL_SCALE)

PREDICATE_OPS = ("=", "<>", "<", "<=", ">", ">=")

Clock = Callable[[], int]


def _default_clock() -> int:
    return int(time.time() * 1000)


# ---------------------------------------------------------------------------
# Connection strings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConnectionSpec:
    data_source: str
    password: str = ""

    def render(self) -> str:
        return f"Data Source = {self.data_source}; Password = {self.password}"


def parse_connection_string(text: str) -> ConnectionSpec:
    """Parse 'Data Source = path; Password = pw' into a ConnectionSpec.

    Keys are matched case-insensitively; Password may be omitted; unknown
    or duplicate keys are rejected.
    """
    if not text or not text.strip():
        raise MalformedConnectionString("empty connection string")
    seen: Dict[str, str] = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        if "=" not in part:
            raise MalformedConnectionString(f"missing '=' in {part.strip()!r}")
        key, _, value = part.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key not in ("data source", "password"):
            raise MalformedConnectionString(f"unknown key {key!r}")
        if key in seen:
            raise MalformedConnectionString(f"duplicate key {key!r}")
        seen[key] = value
    if "data source" not in seen or not seen["data source"]:
        raise MalformedConnectionString("Data Source is required")
    return ConnectionSpec(data_source=seen["data source"], password=seen.get("password", ""))


def default_store_path(executable_dir: str) -> str:
    return os.path.join(executable_dir, DEFAULT_FILENAME)


# ---------------------------------------------------------------------------
# Schema
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ColumnDef:
    name: str
    kind: str
    nullable: bool = False
    primary_key: bool = False
    default: Any = None
    has_default: bool = False


def column(name, kind, nullable=False, primary_key=False, default=None, has_default=False):
    if default is not None:
        has_default = True
    return ColumnDef(name, kind, nullable, primary_key, default, has_default)


@dataclass(frozen=True)
class TableDef:
    name: str
    columns: Tuple[ColumnDef, ...]
    foreign_keys: Tuple[Tuple[str, str], ...] = ()  # (column, referenced table)

    def validate(self) -> None:
        pks = [c for c in self.columns if c.primary_key]
        if len(pks) != 1:
            raise ValueError(f"table {self.name}: exactly one primary key required")
        if pks[0].kind != "integer":
            raise ValueError(f"table {self.name}: primary key must be integer")
        names = [c.name.lower() for c in self.columns]
        if len(set(names)) != len(names):
            raise ValueError(f"table {self.name}: duplicate column names")
        for c in self.columns:
            if c.kind not in KINDS:
                raise ValueError(f"table {self.name}: unknown kind {c.kind!r}")

    @property
    def pk_column(self) -> ColumnDef:
        return next(c for c in self.columns if c.primary_key)

    def column_named(self, name: str) -> ColumnDef:
        low = name.lower()
        for c in self.columns:
            if c.name.lower() == low:
                return c
        raise UnknownColumn(f"{self.name} has no column {name!r}")


DEFAULT_SCHEMA: Tuple[TableDef, ...] = (
    TableDef(
        "Categories",
        (
            column("Category_Id", "integer", primary_key=True),
            column("Category_Name", "text"),
        ),
    ),
    TableDef(
        "Products",
        (
            column("Product_Id", "integer", primary_key=True),
            column("Category_Id", "integer", nullable=True),
            column("Product_Name", "text"),
            column("Price", "decimal"),
            column("Is_Favorite", "boolean", default=False),
        ),
        foreign_keys=(("Category_Id", "Categories"),),
    ),
    TableDef(
        "List",
        (
            column("Item_Id", "integer", primary_key=True),
            column("Product_Id", "integer"),
            column("Bought", "boolean", default=False),
            column("Added_At", "timestamp"),
        ),
        foreign_keys=(("Product_Id", "Products"),),
    ),
)


# ---------------------------------------------------------------------------
# Value checking / coercion
# ---------------------------------------------------------------------------

def coerce_value(kind: str, value: Any, context: str = "") -> Any:
    """Check value against kind, returning the canonical in-memory form."""
    where = f" for {context}" if context else ""
    if value is None:
        return None
    if kind == "integer":
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeMismatch(f"expected integer{where}, got {value!r}")
        return value
    if kind == "decimal":
        if isinstance(value, bool):
            raise TypeMismatch(f"expected decimal{where}, got {value!r}")
        if isinstance(value, int):
            value = Decimal(value)
        if not isinstance(value, Decimal):
            raise TypeMismatch(f"expected decimal{where}, got {value!r}")
        scaled = value.scaleb(DECIMAL_SCALE)
        if scaled != scaled.to_integral_value():
            raise TypeMismatch(f"more than {DECIMAL_SCALE} fractional digits{where}")
        if not (-(2 ** 63) <= int(scaled) < 2 ** 63):
            raise TypeMismatch(f"decimal out of range{where}")
        return int(scaled) * _DECIMAL_QUANTUM
    if kind == "text":
        if not isinstance(value, str):
            raise TypeMismatch(f"expected text{where}, got {value!r}")
        return value
    if kind == "boolean":
        if isinstance(value, bool):
            return value
        if isinstance(value, int) and value in (0, 1):
            return bool(value)
        raise TypeMismatch(f"expected boolean{where}, got {value!r}")
    if kind == "timestamp":
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeMismatch(f"expected timestamp{where}, got {value!r}")
        return value
    raise TypeMismatch(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# Binary encoding
# ---------------------------------------------------------------------------

_KIND_CODE = {k: i for i, k in enumerate(KINDS)}


def _w_bytes(buf: io.BytesIO, data: bytes, lenfmt: str = "<I") -> None:
    buf.write(struct.pack(lenfmt, len(data)))
    buf.write(data)


def _w_str(buf: io.BytesIO, s: str) -> None:
    data = s.encode("utf-8")
    buf.write(struct.pack("<H", len(data)))
    buf.write(data)


def _r_exact(buf: io.BytesIO, n: int) -> bytes:
    data = buf.read(n)
    if len(data) != n:
        raise IoFailure("truncated store file")
    return data


def _r_str(buf: io.BytesIO) -> str:
    (n,) = struct.unpack("<H", _r_exact(buf, 2))
    return _r_exact(buf, n).decode("utf-8")


def _encode_value(buf: io.BytesIO, kind: str, value: Any) -> None:
    if value is None:
        buf.write(b"\x00")
        return
    buf.write(b"\x01")
    if kind == "integer" or kind == "timestamp":
        buf.write(struct.pack("<q", value))
    elif kind == "decimal":
        buf.write(struct.pack("<q", int(value.scaleb(DECIMAL_SCALE))))
    elif kind == "boolean":
        buf.write(b"\x01" if value else b"\x00")
    elif kind == "text":
        _w_bytes(buf, value.encode("utf-8"))
    else:  # pragma: no cover
        raise IoFailure(f"cannot encode kind {kind!r}")


def _decode_value(buf: io.BytesIO, kind: str) -> Any:
    flag = _r_exact(buf, 1)
    if flag == b"\x00":
        return None
    if kind == "integer" or kind == "timestamp":
        return struct.unpack("<q", _r_exact(buf, 8))[0]
    if kind == "decimal":
        return struct.unpack("<q", _r_exact(buf, 8))[0] * _DECIMAL_QUANTUM
    if kind == "boolean":
        return _r_exact(buf, 1) != b"\x00"
    if kind == "text":
        (n,) = struct.unpack("<I", _r_exact(buf, 4))
        return _r_exact(buf, n).decode("utf-8")
    raise IoFailure(f"cannot decode kind {kind!r}")


def _password_digest(salt: bytes, password: str) -> bytes:
    return hashlib.sha256(salt + password.encode("utf-8")).digest()


# ---------------------------------------------------------------------------
# Store
# ---------------------------------------------------------------------------

class _Table:
    __slots__ = ("tdef", "rows", "next_pk")

    def __init__(self, tdef: TableDef, rows: Optional[Dict[int, dict]] = None, next_pk: int = 1):
        self.tdef = tdef
        self.rows = rows if rows is not None else {}
        self.next_pk = next_pk


class Store:
    """Open handle on a store file.  Not safe for concurrent use."""

    def __init__(self, path, password, tables, replica_id, sync_state, clock, lock_fd):
        self.path = path
        self.password = password
        self._tables: Dict[str, _Table] = tables  # canonical-name keyed
        self._names = {n.lower(): n for n in tables}
        self.replica_id: bytes = replica_id
        self.sync_state: dict = sync_state
        self.clock: Clock = clock or _default_clock
        self._lock_fd = lock_fd
        self._salt = b"\x00" * 16
        self._closed = False
        self.change_hook: Optional[Callable[[str, int, str, Optional[dict]], None]] = None

    # -- lifecycle ---------------------------------------------------------

    def close(self) -> None:
        if self._closed:
            raise HandleClosed("store already closed")
        self.flush()
        self._closed = True
        if self._lock_fd is not None:
            try:
                fcntl.flock(self._lock_fd, fcntl.LOCK_UN)
                os.close(self._lock_fd)
            except OSError as e:  # pragma: no cover
                raise IoFailure(str(e)) from e
            self._lock_fd = None

    def flush(self) -> None:
        self._check_open()
        tmp = self.path + ".tmp"
        try:
            with open(tmp, "wb") as f:
                f.write(self._serialize())
                f.flush()
                os.fsync(f.fileno())
            os.replace(tmp, self.path)
            dfd = os.open(os.path.dirname(os.path.abspath(self.path)) or ".", os.O_RDONLY)
            try:
                os.fsync(dfd)
            finally:
                os.close(dfd)
        except OSError as e:
            raise IoFailure(str(e)) from e

    def _check_open(self) -> None:
        if self._closed:
            raise HandleClosed("store handle is closed")

    # -- schema ------------------------------------------------------------

    def table_names(self) -> List[str]:
        return list(self._tables)

    def _table(self, name: str) -> _Table:
        self._check_open()
        canon = self._names.get(name.lower())
        if canon is None:
            raise UnknownTable(f"no table {name!r}")
        return self._tables[canon]

    def table_def(self, name: str) -> TableDef:
        return self._table(name).tdef

    def has_table(self, name: str) -> bool:
        self._check_open()
        return name.lower() in self._names

    def create_table(self, tdef: TableDef) -> None:
        self._check_open()
        tdef.validate()
        if tdef.name.lower() in self._names:
            raise FileExists(f"table {tdef.name} already exists")
        self._tables[tdef.name] = _Table(tdef)
        self._names[tdef.name.lower()] = tdef.name

    def drop_table(self, name: str) -> None:
        tab = self._table(name)
        del self._tables[tab.tdef.name]
        del self._names[tab.tdef.name.lower()]

    def replace_table(self, tdef: TableDef, rows: List[dict]) -> None:
        """Drop-and-recreate used by RDA pull materialization."""
        self._check_open()
        if tdef.name.lower() in self._names:
            self.drop_table(tdef.name)
        self.create_table(tdef)
        tab = self._table(tdef.name)
        pk_name = tdef.pk_column.name
        for row in rows:
            checked = self._check_row(tdef, row, full=True)
            pk = checked[pk_name]
            tab.rows[pk] = checked
            tab.next_pk = max(tab.next_pk, pk + 1)

    def schema_fingerprint(self, table_names: Optional[List[str]] = None) -> str:
        self._check_open()
        names = sorted(table_names if table_names is not None else self._tables)
        parts = []
        for n in names:
            tdef = self.table_def(n)
            cols = ";".join(
                f"{c.name.lower()}:{c.kind}:{int(c.nullable)}:{int(c.primary_key)}"
                for c in tdef.columns
            )
            fks = ";".join(f"{a.lower()}>{b.lower()}" for a, b in tdef.foreign_keys)
            parts.append(f"{tdef.name.lower()}({cols})[{fks}]")
        return hashlib.sha256("|".join(parts).encode("utf-8")).hexdigest()

    # -- row validation ----------------------------------------------------

    def _check_row(self, tdef: TableDef, values: dict, full: bool) -> dict:
        """Validate a {column: value} mapping.  full=True fills defaults and
        requires every non-nullable column; full=False checks only the keys
        present (update path)."""
        lower_cols = {c.name.lower(): c for c in tdef.columns}
        out: Dict[str, Any] = {}
        for key, val in values.items():
            col = lower_cols.get(key.lower())
            if col is None:
                raise UnknownColumn(f"{tdef.name} has no column {key!r}")
            if col.name in out:
                raise UnknownColumn(f"duplicate column {key!r}")
            out[col.name] = coerce_value(col.kind, val, f"{tdef.name}.{col.name}")
        if full:
            for col in tdef.columns:
                if col.name in out and out[col.name] is not None:
                    continue
                if col.name not in out and col.has_default:
                    out[col.name] = coerce_value(col.kind, col.default)
                    continue
                if out.get(col.name) is None:
                    if col.primary_key:
                        continue  # assigned by caller
                    if not col.nullable:
                        raise NullViolation(f"{tdef.name}.{col.name} may not be null")
                    out[col.name] = None
        else:
            for name, val in out.items():
                col = lower_cols[name.lower()]
                if val is None and not col.nullable:
                    raise NullViolation(f"{tdef.name}.{name} may not be null")
        return out

    def _check_fks(self, tdef: TableDef, row: dict) -> None:
        for col_name, ref_table in tdef.foreign_keys:
            val = row.get(col_name)
            if val is None:
                continue
            ref = self._table(ref_table)
            if val not in ref.rows:
                raise ForeignKeyViolation(
                    f"{tdef.name}.{col_name}={val} has no match in {ref_table}"
                )

    def _referencing_rows(self, table: str, pk: int) -> Optional[str]:
        for other in self._tables.values():
            for col_name, ref_table in other.tdef.foreign_keys:
                if ref_table.lower() != table.lower():
                    continue
                if any(r.get(col_name) == pk for r in other.rows.values()):
                    return other.tdef.name
        return None

    # -- mutations ---------------------------------------------------------

    def insert_row(self, table: str, values: dict, pk: Optional[int] = None) -> int:
        tab = self._table(table)
        tdef = tab.tdef
        row = self._check_row(tdef, values, full=True)
        pk_name = tdef.pk_column.name
        if pk is None:
            pk = row.get(pk_name) or tab.next_pk
        if pk in tab.rows:
            raise TypeMismatch(f"{tdef.name} already has primary key {pk}")
        row[pk_name] = pk
        self._check_fks(tdef, row)
        tab.rows[pk] = row
        tab.next_pk = max(tab.next_pk, pk + 1)
        self._fire(tdef.name, pk, "insert", row)
        return pk

    def update_row(self, table: str, pk: int, assignments: dict) -> bool:
        tab = self._table(table)
        tdef = tab.tdef
        checked = self._check_row(tdef, assignments, full=False)
        pk_name = tdef.pk_column.name
        if pk_name in checked and checked[pk_name] != pk:
            raise TypeMismatch("cannot reassign primary key")
        if pk not in tab.rows:
            return False
        candidate = dict(tab.rows[pk])
        candidate.update(checked)
        self._check_fks(tdef, candidate)
        tab.rows[pk] = candidate
        self._fire(tdef.name, pk, "update", candidate)
        return True

    def delete_row(self, table: str, pk: int) -> bool:
        tab = self._table(table)
        if pk not in tab.rows:
            return False
        holder = self._referencing_rows(tab.tdef.name, pk)
        if holder is not None:
            raise ForeignKeyViolation(
                f"{tab.tdef.name}[{pk}] is still referenced by {holder}"
            )
        del tab.rows[pk]
        self._fire(tab.tdef.name, pk, "delete", None)
        return True

    def _fire(self, table: str, pk: int, op: str, payload: Optional[dict]) -> None:
        if self.change_hook is not None:
            self.change_hook(table, pk, op, dict(payload) if payload else None)

    # -- sync application (no hooks, no auto pk) ---------------------------

    def apply_sync_upsert(self, table: str, pk: int, payload: dict) -> None:
        tab = self._table(table)
        tdef = tab.tdef
        row = self._check_row(tdef, payload, full=True)
        row[tdef.pk_column.name] = pk
        self._check_fks(tdef, row)
        tab.rows[pk] = row
        tab.next_pk = max(tab.next_pk, pk + 1)

    def apply_sync_delete(self, table: str, pk: int) -> bool:
        tab = self._table(table)
        if pk not in tab.rows:
            return False
        holder = self._referencing_rows(tab.tdef.name, pk)
        if holder is not None:
            raise ForeignKeyViolation(
                f"{tab.tdef.name}[{pk}] is still referenced by {holder}"
            )
        del tab.rows[pk]
        return True

    # -- reads -------------------------------------------------------------

    def scan(self, table: str, predicate: Optional[Tuple[str, str, Any]] = None) -> List[dict]:
        tab = self._table(table)
        tdef = tab.tdef
        rows = [dict(tab.rows[pk]) for pk in sorted(tab.rows)]
        if predicate is None:
            return rows
        col_name, op, literal = predicate
        col = tdef.column_named(col_name)
        if op not in PREDICATE_OPS:
            raise TypeMismatch(f"unsupported operator {op!r}")
        lit = coerce_value(col.kind, literal, f"predicate on {tdef.name}.{col.name}")
        return [r for r in rows if _compare(r[col.name], op, lit)]

    def get_row(self, table: str, pk: int) -> Optional[dict]:
        tab = self._table(table)
        row = tab.rows.get(pk)
        return dict(row) if row is not None else None

    # -- snapshots (server-side request atomicity) -------------------------

    def snapshot(self) -> dict:
        self._check_open()
        return {
            "tables": {
                n: (t.tdef, {pk: dict(r) for pk, r in t.rows.items()}, t.next_pk)
                for n, t in self._tables.items()
            },
            "sync_state": json.loads(json.dumps(self.sync_state)),
        }

    def restore(self, snap: dict) -> None:
        self._check_open()
        self._tables = {
            n: _Table(tdef, {pk: dict(r) for pk, r in rows.items()}, next_pk)
            for n, (tdef, rows, next_pk) in snap["tables"].items()
        }
        self._names = {n.lower(): n for n in self._tables}
        self.sync_state = snap["sync_state"]

    # -- serialization -----------------------------------------------------

    def _serialize(self) -> bytes:
        if self.password:
            salt = self._salt
            digest = _password_digest(salt, self.password)
        else:
            salt = b"\x00" * 16
            digest = b"\x00" * 32
        buf = io.BytesIO()
        buf.write(struct.pack(
            "<4sH16s32s16sH",
            MAGIC, FORMAT_VERSION, salt, digest, self.replica_id, len(self._tables),
        ))
        for tab in self._tables.values():
            self._serialize_table(buf, tab)
        _w_bytes(buf, json.dumps(self.sync_state, sort_keys=True).encode("utf-8"))
        return buf.getvalue()

    @staticmethod
    def _serialize_table(buf: io.BytesIO, tab: _Table) -> None:
        tdef = tab.tdef
        _w_str(buf, tdef.name)
        buf.write(struct.pack("<H", len(tdef.columns)))
        for c in tdef.columns:
            _w_str(buf, c.name)
            flags = (1 if c.nullable else 0) | (2 if c.primary_key else 0) | (4 if c.has_default else 0)
            buf.write(struct.pack("<BB", _KIND_CODE[c.kind], flags))
            if c.has_default:
                _encode_value(buf, c.kind, coerce_value(c.kind, c.default))
        buf.write(struct.pack("<H", len(tdef.foreign_keys)))
        for col_name, ref in tdef.foreign_keys:
            _w_str(buf, col_name)
            _w_str(buf, ref)
        buf.write(struct.pack("<QI", tab.next_pk, len(tab.rows)))
        log = io.BytesIO()
        for pk in sorted(tab.rows):
            row = tab.rows[pk]
            log.write(struct.pack("<Q", pk))
            for c in tdef.columns:
                _encode_value(log, c.kind, row.get(c.name))
        data = log.getvalue()
        buf.write(data)
        buf.write(struct.pack("<Q", len(data)))  # trailing committed length


def _compare(value: Any, op: str, literal: Any) -> bool:
    if value is None:
        return False
    if op == "=":
        return value == literal
    if op == "<>":
        return value != literal
    if op == "<":
        return value < literal
    if op == "<=":
        return value <= literal
    if op == ">":
        return value > literal
    return value >= literal


# ---------------------------------------------------------------------------
# Open / create
# ---------------------------------------------------------------------------

def _acquire_lock(path: str) -> int:
    fd = os.open(path + ".lock", os.O_CREAT | os.O_RDWR, 0o644)
    try:
        fcntl.flock(fd, fcntl.LOCK_EX | fcntl.LOCK_NB)
    except OSError as e:
        os.close(fd)
        raise IoFailure(f"store is locked by another writer: {path}") from e
    return fd


def create_store(spec: ConnectionSpec, schema=DEFAULT_SCHEMA, clock: Optional[Clock] = None) -> Store:
    if os.path.exists(spec.data_source):
        raise FileExists(f"{spec.data_source} already exists")
    for tdef in schema:
        tdef.validate()
    lock_fd = _acquire_lock(spec.data_source)
    try:
        tables = {tdef.name: _Table(tdef) for tdef in schema}
        store = Store(
            path=spec.data_source,
            password=spec.password,
            tables=tables,
            replica_id=os.urandom(16),
            sync_state={},
            clock=clock,
            lock_fd=lock_fd,
        )
        store._salt = os.urandom(16) if spec.password else b"\x00" * 16
        store.flush()
        return store
    except Exception:
        fcntl.flock(lock_fd, fcntl.LOCK_UN)
        os.close(lock_fd)
        raise


def open_store(spec: ConnectionSpec, clock: Optional[Clock] = None) -> Store:
    try:
        with open(spec.data_source, "rb") as f:
            raw = f.read()
    except OSError as e:
        raise IoFailure(str(e)) from e
    if len(raw) < 72:
        raise IoFailure("store file shorter than header")
    magic, version, salt, digest, replica_id, table_count = struct.unpack(
        "<4sH16s32s16sH", raw[:72]
    )
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(f"format version {version}")
    if digest == b"\x00" * 32:
        if spec.password:
            raise BadPassword("store has no password")
    else:
        if _password_digest(salt, spec.password) != digest:
            raise BadPassword("password digest mismatch")

    buf = io.BytesIO(raw[72:])
    tables: Dict[str, _Table] = {}
    for _ in range(table_count):
        tab = _read_table(buf)
        tables[tab.tdef.name] = tab
    (n,) = struct.unpack("<I", _r_exact(buf, 4))
    sync_state = json.loads(_r_exact(buf, n).decode("utf-8"))

    lock_fd = _acquire_lock(spec.data_source)
    store = Store(
        path=spec.data_source,
        password=spec.password,
        tables=tables,
        replica_id=replica_id,
        sync_state=sync_state,
        clock=clock,
        lock_fd=lock_fd,
    )
    store._salt = salt
    return store


def _read_table(buf: io.BytesIO) -> _Table:
    name = _r_str(buf)
    (ncols,) = struct.unpack("<H", _r_exact(buf, 2))
    cols = []
    for _ in range(ncols):
        cname = _r_str(buf)
        kind_code, flags = struct.unpack("<BB", _r_exact(buf, 2))
        if kind_code >= len(KINDS):
            raise IoFailure(f"unknown column kind code {kind_code}")
        kind = KINDS[kind_code]
        has_default = bool(flags & 4)
        default = _decode_value(buf, kind) if has_default else None
        cols.append(ColumnDef(cname, kind, bool(flags & 1), bool(flags & 2), default, has_default))
    (nfk,) = struct.unpack("<H", _r_exact(buf, 2))
    fks = tuple((_r_str(buf), _r_str(buf)) for _ in range(nfk))
    tdef = TableDef(name, tuple(cols), fks)
    tdef.validate()
    next_pk, nrows = struct.unpack("<QI", _r_exact(buf, 12))
    start = buf.tell()
    rows: Dict[int, dict] = {}
    for _ in range(nrows):
        (pk,) = struct.unpack("<Q", _r_exact(buf, 8))
        row = {c.name: _decode_value(buf, c.kind) for c in cols}
        rows[pk] = row
    consumed = buf.tell() - start
    (committed,) = struct.unpack("<Q", _r_exact(buf, 8))
    if committed != consumed:
        raise IoFailure(f"table {name}: committed length {committed} != {consumed}")
    return _Table(tdef, rows, next_pk)
