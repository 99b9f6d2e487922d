"""Change tracking and the two server-exchange methods.

Merge replication: both sides exchange coalesced per-row change logs since
their mutual anchors, resolve row-level conflicts by policy, and apply the
winners, so repeated exchanges converge.  Remote Data Access: pull a server
query into a local tracked table, push local edits back row by row, or
submit a single SQL command.

The tracker's state lives inside the store file (store.sync_state), so
tombstones, anchors and counters survive close/reopen.  Rows travel as
JSON-safe payloads with decimals encoded as strings.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Any, Dict, Iterable, List, Optional, Tuple

from . import sqlcmd
from .errors import (
    ForeignKeyViolation,
    MalformedRequest,
    NotAQuery,
    NotTracked,
    NullViolation,
    PendingChangesExist,
    SchemaMismatch,
    TrackingDisabled,
    TrackingModeConflict,
    TypeMismatch,
    UnknownColumn,
)
from .store import ColumnDef, Store, TableDef

logger = logging.getLogger(__name__)

POLICY_SERVER_WINS = "server"
POLICY_CLIENT_WINS = "client"
POLICY_LATEST = "latest"
POLICIES = (POLICY_SERVER_WINS, POLICY_CLIENT_WINS, POLICY_LATEST)

OP_INSERT = "insert"
OP_UPDATE = "update"
OP_DELETE = "delete"

MODE_MERGE = "merge"
MODE_RDA = "rda"

REASON_ROW_MISSING = "RowMissingOnServer"
REASON_INTEGRITY = "IntegrityViolation"
REASON_TYPE = "TypeMismatch"


# ---------------------------------------------------------------------------
# Wire-safe row payloads
# ---------------------------------------------------------------------------

def encode_row(tdef: TableDef, row: dict) -> dict:
    """Typed row -> JSON-safe payload (decimals as strings)."""
    out = {}
    for col in tdef.columns:
        if col.name not in row:
            continue
        val = row[col.name]
        if isinstance(val, Decimal):
            val = format(val, "f")
        out[col.name] = val
    return out


def decode_row(tdef: TableDef, payload: dict) -> dict:
    """JSON payload -> typed row values (strings back to decimals)."""
    out = {}
    for key, val in payload.items():
        col = tdef.column_named(key)
        if col.kind == "decimal" and isinstance(val, str):
            try:
                val = Decimal(val)
            except InvalidOperation as e:
                raise TypeMismatch(f"bad decimal {val!r} for {tdef.name}.{col.name}") from e
        out[col.name] = val
    return out


# ---------------------------------------------------------------------------
# Records, anchors, reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChangeRecord:
    table: str
    pk: int
    op: str  # insert | update | delete
    replica: str  # 32 hex chars, the originating replica
    counter: int
    wall_time_ms: int
    payload: Optional[dict]  # wire-encoded row; None for deletes

    def to_json(self) -> dict:
        d = {
            "table": self.table,
            "pk": self.pk,
            "op": self.op,
            "replica": self.replica,
            "counter": self.counter,
            "wall_time_ms": self.wall_time_ms,
        }
        if self.payload is not None:
            d["payload"] = self.payload
        return d

    @classmethod
    def from_json(cls, d: Any) -> "ChangeRecord":
        try:
            rec = cls(
                table=d["table"],
                pk=int(d["pk"]),
                op=d["op"],
                replica=d["replica"],
                counter=int(d["counter"]),
                wall_time_ms=int(d["wall_time_ms"]),
                payload=d.get("payload"),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedRequest(f"bad change record: {e}") from e
        if rec.op not in (OP_INSERT, OP_UPDATE, OP_DELETE):
            raise MalformedRequest(f"bad op {rec.op!r}")
        if rec.op == OP_DELETE and rec.payload is not None:
            raise MalformedRequest("delete record carries a payload")
        if rec.op != OP_DELETE and rec.payload is None:
            raise MalformedRequest(f"{rec.op} record is missing its payload")
        return rec


@dataclass(frozen=True)
class Conflict:
    table: str
    pk: int
    winner_replica: str
    policy: str

    def to_json(self) -> dict:
        return {
            "table": self.table,
            "pk": self.pk,
            "winner_replica": self.winner_replica,
            "policy": self.policy,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Conflict":
        return cls(d["table"], int(d["pk"]), d["winner_replica"], d["policy"])


@dataclass
class MergeReport:
    applied_local: int
    applied_remote: int
    conflicts: List[Conflict] = field(default_factory=list)


@dataclass(frozen=True)
class PushError:
    table: str
    pk: int
    reason: str


def _record_sort_key(rec: ChangeRecord):
    return (rec.counter, rec.replica, rec.table, rec.pk)


def resolve_conflict(policy: str, client_rec: ChangeRecord, server_rec: ChangeRecord) -> ChangeRecord:
    if policy == POLICY_SERVER_WINS:
        return server_rec
    if policy == POLICY_CLIENT_WINS:
        return client_rec
    if policy == POLICY_LATEST:
        # later wall time wins; ties go to the lexicographically smaller replica
        a, b = client_rec, server_rec
        if a.wall_time_ms != b.wall_time_ms:
            return a if a.wall_time_ms > b.wall_time_ms else b
        return a if a.replica < b.replica else b
    raise MalformedRequest(f"unknown conflict policy {policy!r}")


# ---------------------------------------------------------------------------
# Change tracker
# ---------------------------------------------------------------------------

class ChangeTracker:
    """View over a store's persisted sync state; installs the change hook."""

    def __init__(self, store: Store):
        self.store = store
        state = store.sync_state
        state.setdefault("tracked", {})
        state.setdefault("counter", 0)
        state.setdefault("anchor", {})
        state.setdefault("log", {})
        state.setdefault("push_seen", {})
        state.setdefault("acked", 0)
        self.state = state
        store.change_hook = self._on_change

    @property
    def replica(self) -> str:
        return self.store.replica_id.hex()

    @property
    def anchor(self) -> Dict[str, int]:
        return self.state["anchor"]

    # -- tracking configuration -------------------------------------------

    def tracking_info(self, table: str) -> Optional[dict]:
        canon = self.store.table_def(table).name
        return self.state["tracked"].get(canon)

    def enable_merge_tracking(self, tables: Iterable[str]) -> None:
        for t in tables:
            canon = self.store.table_def(t).name
            info = self.state["tracked"].get(canon)
            if info and info["mode"] == MODE_RDA:
                raise TrackingModeConflict(f"{canon} is RDA-tracked")
            self.state["tracked"][canon] = {"mode": MODE_MERGE}

    def enable_rda_tracking(self, table: str, source_table: str, pk_column: str) -> None:
        canon = self.store.table_def(table).name
        info = self.state["tracked"].get(canon)
        if info and info["mode"] == MODE_MERGE:
            raise TrackingModeConflict(f"{canon} is merge-tracked")
        self.state["tracked"][canon] = {
            "mode": MODE_RDA,
            "source": source_table,
            "pk": pk_column,
        }
        self.state["log"].pop(canon, None)

    def disable_tracking(self, table: str) -> None:
        canon = self.store.table_def(table).name
        self.state["tracked"].pop(canon, None)
        self.state["log"].pop(canon, None)

    def merge_tables(self) -> List[str]:
        return sorted(
            t for t, info in self.state["tracked"].items() if info["mode"] == MODE_MERGE
        )

    # -- recording ---------------------------------------------------------

    def _on_change(self, table: str, pk: int, op: str, payload: Optional[dict]) -> None:
        canon = self.store.table_def(table).name
        if canon not in self.state["tracked"]:
            return
        self.record_change(table, pk, op, payload)

    def record_change(self, table: str, pk: int, op: str, payload: Optional[dict]) -> Optional[ChangeRecord]:
        canon = self.store.table_def(table).name
        if canon not in self.state["tracked"]:
            raise TrackingDisabled(f"{canon} is not tracked")
        tdef = self.store.table_def(canon)
        table_log = self.state["log"].setdefault(canon, {})
        key = str(pk)
        existing = table_log.get(key)
        existing_rec = ChangeRecord.from_json(existing) if existing else None

        # "base" marks the counter at which this row's local change chain was
        # born; once the chain's first counter has been acknowledged by a peer
        # a delete must leave a tombstone rather than netting out silently.
        if existing is not None:
            base = existing.get("base", 0)
        elif op == OP_INSERT:
            base = self.state["counter"] + 1
        else:
            base = 0

        if op == OP_DELETE:
            if (
                existing_rec is not None
                and existing_rec.op == OP_INSERT
                and base > self.state["acked"]
            ):
                # never-exchanged insert followed by delete nets out to nothing
                del table_log[key]
                return None
            new_op = OP_DELETE
            wire_payload = None
        else:
            if existing_rec is not None and existing_rec.op == OP_INSERT and op == OP_UPDATE:
                new_op = OP_INSERT
            else:
                new_op = op
            wire_payload = encode_row(tdef, payload or {})

        self.state["counter"] += 1
        counter = self.state["counter"]
        rec = ChangeRecord(
            table=canon,
            pk=pk,
            op=new_op,
            replica=self.replica,
            counter=counter,
            wall_time_ms=self.store.clock(),
            payload=wire_payload,
        )
        stored = rec.to_json()
        stored["base"] = base
        table_log[key] = stored
        self._advance(self.replica, counter)
        return rec

    def adopt(self, rec: ChangeRecord) -> None:
        """Install a remote winner record in the log and advance anchors."""
        canon = self.store.table_def(rec.table).name
        self.state["log"].setdefault(canon, {})[str(rec.pk)] = rec.to_json()
        self._advance(rec.replica, rec.counter)

    def _advance(self, replica: str, counter: int) -> None:
        cur = self.state["anchor"].get(replica, 0)
        if counter > cur:
            self.state["anchor"][replica] = counter

    def note_acked(self, counter: int) -> None:
        if counter > self.state["acked"]:
            self.state["acked"] = counter

    # -- collection --------------------------------------------------------

    def all_records(self, tables: Optional[Iterable[str]] = None) -> List[ChangeRecord]:
        return self.collect_changes({}, tables)

    def collect_changes(
        self, since: Dict[str, int], tables: Optional[Iterable[str]] = None
    ) -> List[ChangeRecord]:
        wanted = None if tables is None else {t.lower() for t in tables}
        out = []
        for table, entries in self.state["log"].items():
            if wanted is not None and table.lower() not in wanted:
                continue
            for raw in entries.values():
                rec = ChangeRecord.from_json(raw)
                if rec.counter > since.get(rec.replica, 0):
                    out.append(rec)
        out.sort(key=_record_sort_key)
        return out

    def records_for(self, table: str) -> List[ChangeRecord]:
        canon = self.store.table_def(table).name
        recs = [ChangeRecord.from_json(r) for r in self.state["log"].get(canon, {}).values()]
        recs.sort(key=_record_sort_key)
        return recs

    def clear_records(self, table: str, pks: Iterable[int]) -> None:
        canon = self.store.table_def(table).name
        entries = self.state["log"].get(canon, {})
        for pk in pks:
            entries.pop(str(pk), None)

    def pending_count(self, table: str) -> int:
        canon = self.store.table_def(table).name
        return len(self.state["log"].get(canon, {}))

    # -- tombstone retention ----------------------------------------------

    def gc_tombstones(self, acknowledged: Iterable[Dict[str, int]]) -> int:
        anchors = list(acknowledged)
        if not anchors:
            return 0
        purged = 0
        for table, entries in self.state["log"].items():
            for key in list(entries):
                rec = ChangeRecord.from_json(entries[key])
                if rec.op != OP_DELETE:
                    continue
                if all(a.get(rec.replica, 0) >= rec.counter for a in anchors):
                    del entries[key]
                    purged += 1
        return purged


def gc_tombstones(tracker: ChangeTracker, acknowledged: Iterable[Dict[str, int]]) -> int:
    return tracker.gc_tombstones(acknowledged)


# ---------------------------------------------------------------------------
# Applying records to a store
# ---------------------------------------------------------------------------

def _table_order(store: Store, tables: Iterable[str]) -> List[str]:
    """FK-dependency order: referenced tables first."""
    names = sorted({store.table_def(t).name for t in tables})
    deps = {
        n: {ref for _, ref in store.table_def(n).foreign_keys if ref in names}
        for n in names
    }
    out: List[str] = []
    while deps:
        ready = sorted(n for n, d in deps.items() if d <= set(out))
        if not ready:  # cycle; fall back to name order
            ready = sorted(deps)
        out.extend(ready)
        for n in ready:
            del deps[n]
    return out


def application_order(store: Store, records: List[ChangeRecord]) -> List[ChangeRecord]:
    """Upserts in FK order (parents first), then deletes in reverse FK order."""
    upserts = [r for r in records if r.op != OP_DELETE]
    deletes = [r for r in records if r.op == OP_DELETE]
    order = _table_order(store, {r.table for r in records})
    rank = {t: i for i, t in enumerate(order)}
    upserts.sort(key=lambda r: (rank[store.table_def(r.table).name], r.pk))
    deletes.sort(key=lambda r: (-rank[store.table_def(r.table).name], -r.pk))
    return upserts + deletes


def apply_record(store: Store, rec: ChangeRecord) -> bool:
    """Apply one winner record, without firing change hooks."""
    tdef = store.table_def(rec.table)
    if rec.op == OP_DELETE:
        store.apply_sync_delete(tdef.name, rec.pk)
        return True
    store.apply_sync_upsert(tdef.name, rec.pk, decode_row(tdef, rec.payload))
    return True


# ---------------------------------------------------------------------------
# Server half (used in-process and behind the HTTP API)
# ---------------------------------------------------------------------------

def serve_merge(store: Store, request: dict, default_policy: str = POLICY_LATEST) -> dict:
    """Apply a client ChangeSet and answer with everything it lacks.

    Atomic per request: any failure restores the pre-request state.
    """
    try:
        client_replica = request["replica_id"]
        basis = {str(k): int(v) for k, v in request.get("basis_anchor", {}).items()}
        incoming = [ChangeRecord.from_json(r) for r in request.get("records", [])]
        tables = list(request.get("tables", []))
        client_schema = request.get("schema")
    except (KeyError, TypeError, AttributeError) as e:
        raise MalformedRequest(f"malformed merge request: {e}") from e
    policy = request.get("policy") or default_policy
    if policy not in POLICIES:
        raise MalformedRequest(f"unknown policy {policy!r}")

    tracker = ChangeTracker(store)
    if client_schema is not None:
        for t in tables:
            if not store.has_table(t):
                raise SchemaMismatch(f"server has no table {t!r}")
        if store.schema_fingerprint(tables) != client_schema:
            raise SchemaMismatch("table schemas differ between client and server")

    snap = store.snapshot()
    try:
        outgoing = tracker.collect_changes(basis, tables or None)
        out_by_key = {(r.table.lower(), r.pk): r for r in outgoing}
        anchor = tracker.anchor
        unseen = [r for r in incoming if r.counter > anchor.get(r.replica, 0)]

        conflicts: List[Conflict] = []
        winners_for_client: Dict[Tuple[str, int], ChangeRecord] = dict(out_by_key)
        to_apply: List[ChangeRecord] = []
        for rec in unseen:
            key = (rec.table.lower(), rec.pk)
            local = out_by_key.get(key)
            if local is None:
                winner = rec
            else:
                winner = resolve_conflict(policy, client_rec=rec, server_rec=local)
                conflicts.append(Conflict(local.table, rec.pk, winner.replica, policy))
            if winner is rec:
                to_apply.append(rec)
                winners_for_client[key] = rec
            else:
                tracker._advance(rec.replica, rec.counter)

        applied = 0
        for rec in application_order(store, to_apply):
            try:
                apply_record(store, rec)
                applied += 1
            except ForeignKeyViolation as e:
                logger.warning("merge: skipped %s[%s]: %s", rec.table, rec.pk, e)
            tracker.adopt(rec)

        tracker.note_acked(basis.get(tracker.replica, 0))
        response_records = [
            r for r in winners_for_client.values()
            if r.counter > basis.get(r.replica, 0)
        ]
        response_records.sort(key=_record_sort_key)
        store.flush()
        return {
            "replica_id": tracker.replica,
            "records": [r.to_json() for r in response_records],
            "anchors": dict(tracker.anchor),
            "conflicts": [c.to_json() for c in conflicts],
            "applied": applied,
        }
    except Exception:
        store.restore(snap)
        raise


def serve_pull(store: Store, request: dict) -> dict:
    try:
        query = request["query"]
    except (KeyError, TypeError) as e:
        raise MalformedRequest("pull request needs a query") from e
    cmd = sqlcmd.parse(query)
    if not isinstance(cmd, sqlcmd.Select):
        raise NotAQuery("pull takes a SELECT")
    rs = sqlcmd.fill(store, cmd)
    tdef = store.table_def(cmd.table)
    cols = [tdef.column_named(c) for c in rs.columns]
    rows = []
    for row in rs.rows:
        rows.append([
            format(v, "f") if isinstance(v, Decimal) else v for v in row
        ])
    tracker = ChangeTracker(store)
    return {
        "source_table": tdef.name,
        "pk_column": tdef.pk_column.name,
        "columns": [
            {"name": c.name, "kind": c.kind, "nullable": c.nullable} for c in cols
        ],
        "rows": rows,
        "anchor": dict(tracker.anchor),
    }


def serve_push(store: Store, request: dict) -> dict:
    try:
        table = request["table"]
        replica = request["replica_id"]
        records = [ChangeRecord.from_json(r) for r in request.get("records", [])]
    except (KeyError, TypeError) as e:
        raise MalformedRequest(f"malformed push request: {e}") from e
    tdef = store.table_def(table)  # UnknownTable propagates
    tracker = ChangeTracker(store)
    seen = tracker.state["push_seen"].get(replica, 0)

    fresh = [r for r in records if r.counter > seen]
    deletes = sorted((r for r in fresh if r.op == OP_DELETE), key=lambda r: -r.pk)
    updates = sorted((r for r in fresh if r.op == OP_UPDATE), key=lambda r: r.pk)
    inserts = sorted((r for r in fresh if r.op == OP_INSERT), key=lambda r: r.pk)

    applied = 0
    errors: List[dict] = []

    def fail(rec: ChangeRecord, reason: str) -> None:
        errors.append({"table": tdef.name, "pk": rec.pk, "reason": reason})

    for rec in deletes + updates + inserts:
        try:
            if rec.op == OP_DELETE:
                if store.delete_row(tdef.name, rec.pk):
                    applied += 1
                else:
                    fail(rec, REASON_ROW_MISSING)
            else:
                values = decode_row(tdef, rec.payload)
                values.pop(tdef.pk_column.name, None)
                if rec.op == OP_UPDATE:
                    if store.update_row(tdef.name, rec.pk, values):
                        applied += 1
                    else:
                        fail(rec, REASON_ROW_MISSING)
                else:
                    if store.get_row(tdef.name, rec.pk) is not None:
                        fail(rec, REASON_INTEGRITY)
                    else:
                        store.insert_row(tdef.name, values, pk=rec.pk)
                        applied += 1
        except ForeignKeyViolation:
            fail(rec, REASON_INTEGRITY)
        except NullViolation:
            fail(rec, REASON_INTEGRITY)
        except (TypeMismatch, UnknownColumn):
            fail(rec, REASON_TYPE)

    if records:
        top = max(r.counter for r in records)
        if top > seen:
            tracker.state["push_seen"][replica] = top
    store.flush()
    return {"applied": applied, "errors": errors}


def serve_submit(store: Store, request: dict) -> dict:
    try:
        sql = request["sql"]
    except (KeyError, TypeError) as e:
        raise MalformedRequest("submit request needs sql text") from e
    cmd = sqlcmd.parse(sql)
    if isinstance(cmd, sqlcmd.Select):
        raise NotAQuery("submit is command-only")
    affected = sqlcmd.execute_non_query(store, cmd)
    store.flush()
    return {"affected": affected}


# ---------------------------------------------------------------------------
# Client half
# ---------------------------------------------------------------------------

def merge_exchange(store: Store, endpoint, policy: str = POLICY_LATEST) -> MergeReport:
    """Run one bidirectional merge against a remote endpoint."""
    if policy not in POLICIES:
        raise MalformedRequest(f"unknown policy {policy!r}")
    tracker = ChangeTracker(store)
    tables = tracker.merge_tables()
    request = {
        "replica_id": tracker.replica,
        "basis_anchor": dict(tracker.anchor),
        "records": [r.to_json() for r in tracker.all_records(tables)],
        "tables": tables,
        "schema": store.schema_fingerprint(tables),
        "policy": policy,
    }
    response = endpoint.merge(request)

    try:
        records = [ChangeRecord.from_json(r) for r in response["records"]]
        conflicts = [Conflict.from_json(c) for c in response.get("conflicts", [])]
        applied_remote = int(response.get("applied", 0))
        server_anchor = {str(k): int(v) for k, v in response.get("anchors", {}).items()}
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedRequest(f"malformed merge response: {e}") from e

    applied_local = 0
    fresh = [r for r in records if r.counter > tracker.anchor.get(r.replica, 0)]
    for rec in application_order(store, fresh):
        try:
            apply_record(store, rec)
            applied_local += 1
        except ForeignKeyViolation as e:
            logger.warning("merge: skipped %s[%s]: %s", rec.table, rec.pk, e)
        tracker.adopt(rec)
    for replica, counter in server_anchor.items():
        tracker._advance(replica, counter)
    tracker.note_acked(server_anchor.get(tracker.replica, 0))
    store.flush()
    return MergeReport(applied_local, applied_remote, conflicts)


def rda_pull(store: Store, endpoint, local_table: str, query: str, tracking: bool = True) -> int:
    """Materialize a server query as a local table; optionally track edits."""
    tracker = ChangeTracker(store)
    if store.has_table(local_table):
        info = tracker.tracking_info(local_table)
        if info and info["mode"] == MODE_MERGE:
            raise TrackingModeConflict(f"{local_table} is merge-tracked; pull refused")
        if info and tracker.pending_count(local_table) > 0:
            raise PendingChangesExist(
                f"{local_table} has unpushed changes; push or discard them first"
            )

    response = endpoint.pull({"table": local_table, "query": query})
    try:
        source_table = response["source_table"]
        pk_column = response["pk_column"]
        col_specs = response["columns"]
        wire_rows = response["rows"]
    except (KeyError, TypeError) as e:
        raise MalformedRequest(f"malformed pull response: {e}") from e

    names = [c["name"] for c in col_specs]
    has_pk = pk_column in names
    columns = []
    if not has_pk:
        if tracking:
            raise NotTracked(
                f"pull projection must include {pk_column} to track changes"
            )
        columns.append(ColumnDef("_Row_Id", "integer", primary_key=True))
    for c in col_specs:
        columns.append(ColumnDef(
            c["name"], c["kind"],
            nullable=bool(c.get("nullable", True)),
            primary_key=has_pk and c["name"] == pk_column,
        ))
    tdef = TableDef(local_table, tuple(columns))

    rows = []
    for i, wire in enumerate(wire_rows, start=1):
        row = decode_row(tdef, dict(zip(names, wire)))
        if not has_pk:
            row["_Row_Id"] = i
        rows.append(row)

    store.replace_table(tdef, rows)
    if tracking:
        tracker.enable_rda_tracking(local_table, source_table, pk_column)
    else:
        tracker.disable_tracking(local_table)
    store.flush()
    return len(rows)


def rda_push(store: Store, endpoint, local_table: str) -> Tuple[int, List[PushError]]:
    """Send tracked local edits to the server table they were pulled from."""
    tracker = ChangeTracker(store)
    info = tracker.tracking_info(local_table)
    if info is None or info["mode"] != MODE_RDA:
        raise NotTracked(f"{local_table} was not pulled with tracking enabled")
    records = tracker.records_for(local_table)
    source = info["source"]
    request = {
        "table": source,
        "replica_id": tracker.replica,
        "records": [r.to_json() for r in records],
    }
    response = endpoint.push(request)
    try:
        applied = int(response["applied"])
        errors = [
            PushError(e.get("table", source), int(e["pk"]), e["reason"])
            for e in response.get("errors", [])
        ]
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedRequest(f"malformed push response: {e}") from e
    failed_pks = {e.pk for e in errors}
    tracker.clear_records(local_table, [r.pk for r in records if r.pk not in failed_pks])
    store.flush()
    return applied, errors


def rda_submit_sql(endpoint, sql: str) -> int:
    """Run one INSERT/UPDATE/DELETE on the server."""
    response = endpoint.submit({"sql": sql})
    try:
        return int(response["affected"])
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedRequest(f"malformed submit response: {e}") from e
