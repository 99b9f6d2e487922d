"""Shared machinery for the sync and acceptance tests.

Builds multi-replica scenarios over the three app tables, drives random
FK-safe mutations with a controllable clock, keeps an append-only oplog,
and computes the brute-force last-writer-wins oracle from that log.
"""

import random
import shutil
from decimal import Decimal

from shoplist.endpoints import InProcessEndpoint
from shoplist.store import ConnectionSpec, create_store, open_store
from shoplist.sync import ChangeTracker, merge_exchange

APP_TABLES = ("Categories", "Products", "List")


class FakeClock:
    def __init__(self, now=1_000):
        self.now = now

    def __call__(self):
        return self.now

    def advance(self, ms=1):
        self.now += ms


class Replica:
    def __init__(self, path, clock, tracked=APP_TABLES):
        self.path = str(path)
        self.clock = clock
        self.store = create_store(ConnectionSpec(self.path), clock=clock)
        self.tracker = ChangeTracker(self.store)
        if tracked:
            self.tracker.enable_merge_tracking(tracked)

    @property
    def hex(self):
        return self.store.replica_id.hex()

    def close(self):
        self.store.close()


def table_state(store, tables=APP_TABLES):
    """{table: {pk: row}} snapshot for equality comparison."""
    out = {}
    for t in tables:
        pk_name = store.table_def(t).pk_column.name
        out[t] = {row[pk_name]: row for row in store.scan(t)}
    return out


def serialized_rows(store, tables=APP_TABLES):
    """Sorted serialized rows, the byte-comparison form used for convergence."""
    lines = []
    for t in sorted(tables):
        for row in store.scan(t):
            lines.append(t + "|" + repr(sorted(row.items())))
    return "\n".join(sorted(lines))


def merge_pair(a, b, policy="latest"):
    return merge_exchange(a.store, InProcessEndpoint(b.store, policy), policy)


def merge_to_fixpoint(replicas, rng=None, policy="latest", max_rounds=10):
    """Random pairwise merges until a full quiet pass; returns merge count."""
    rng = rng or random.Random(0)
    pairs = [(i, j) for i in range(len(replicas)) for j in range(len(replicas)) if i != j]
    merges = 0
    order = pairs[:]
    rng.shuffle(order)
    for i, j in order:
        merge_pair(replicas[i], replicas[j], policy)
        merges += 1
    for _ in range(max_rounds):
        quiet = True
        for i, j in pairs:
            rep = merge_pair(replicas[i], replicas[j], policy)
            merges += 1
            if rep.applied_local or rep.applied_remote or rep.conflicts:
                quiet = False
        if quiet:
            return merges
    raise AssertionError("pairwise merges did not reach a fixpoint")


# ---------------------------------------------------------------------------
# Random mutations with an oplog for the oracle
# ---------------------------------------------------------------------------

class Scenario:
    """One replica's mutation driver; appends every raw change to a shared
    oplog entry list: (seq, wall_time, replica, table, pk, payload-or-None)."""

    def __init__(self, replica, rng, oplog, seed_info):
        self.r = replica
        self.rng = rng
        self.oplog = oplog
        self.seed = seed_info

    def _log(self, wall, table, pk, payload):
        self.oplog.append({
            "seq": len(self.oplog),
            "wall": wall,
            "replica": self.r.hex,
            "table": table,
            "pk": pk,
            "payload": payload,
        })

    def _pks(self, table):
        pk_name = self.r.store.table_def(table).pk_column.name
        return [row[pk_name] for row in self.r.store.scan(table)]

    def mutate_once(self, wall_time):
        """One random FK-safe mutation at the given wall time."""
        self.r.clock.now = wall_time
        store = self.r.store
        rng = self.rng
        for _ in range(20):  # retry until an applicable op is found
            op = rng.choice([
                "cat_insert", "cat_update",
                "prod_insert", "prod_update", "prod_update",
                "list_insert", "list_update", "list_update", "list_delete",
            ])
            if op == "cat_insert":
                pk = store.insert_row("Categories", {
                    "Category_Name": f"cat-{self.r.hex[:4]}-{rng.randrange(10**6)}",
                })
                self._log(wall_time, "Categories", pk, store.get_row("Categories", pk))
                return
            if op == "cat_update":
                pks = self._pks("Categories")
                if not pks:
                    continue
                pk = rng.choice(pks)
                store.update_row("Categories", pk, {
                    "Category_Name": f"cat-{self.r.hex[:4]}-{rng.randrange(10**6)}",
                })
                self._log(wall_time, "Categories", pk, store.get_row("Categories", pk))
                return
            if op == "prod_insert":
                cats = self._pks("Categories")
                pk = store.insert_row("Products", {
                    "Category_Id": rng.choice(cats) if cats and rng.random() < 0.8 else None,
                    "Product_Name": f"prod-{rng.randrange(10**6)}",
                    "Price": Decimal(rng.randrange(0, 10_000)) / 100,
                    "Is_Favorite": rng.random() < 0.3,
                })
                self._log(wall_time, "Products", pk, store.get_row("Products", pk))
                return
            if op == "prod_update":
                pks = self._pks("Products")
                if not pks:
                    continue
                pk = rng.choice(pks)
                assignment = rng.choice([
                    {"Price": Decimal(rng.randrange(0, 10_000)) / 100},
                    {"Is_Favorite": rng.random() < 0.5},
                    {"Product_Name": f"prod-{rng.randrange(10**6)}"},
                ])
                store.update_row("Products", pk, assignment)
                self._log(wall_time, "Products", pk, store.get_row("Products", pk))
                return
            if op == "list_insert":
                prods = self._pks("Products")
                if not prods:
                    continue
                pk = store.insert_row("List", {
                    "Product_Id": rng.choice(prods),
                    "Bought": False,
                    "Added_At": wall_time,
                })
                self._log(wall_time, "List", pk, store.get_row("List", pk))
                return
            if op == "list_update":
                pks = self._pks("List")
                if not pks:
                    continue
                pk = rng.choice(pks)
                row = store.get_row("List", pk)
                store.update_row("List", pk, {"Bought": not row["Bought"]})
                self._log(wall_time, "List", pk, store.get_row("List", pk))
                return
            if op == "list_delete":
                # only seed items: their tombstones are real cross-replica deletes
                live = [pk for pk in self.seed["list_items"] if self.r.store.get_row("List", pk)]
                if not live:
                    continue
                pk = rng.choice(live)
                store.delete_row("List", pk)
                self._log(wall_time, "List", pk, None)
                return
        raise AssertionError("no applicable mutation found")


def build_seed(replica, rng, oplog, n_categories=3, n_products=6, n_items=4):
    """Populate the first replica; every row lands in the oplog too."""
    t = replica.clock.now
    cats, prods, items = [], [], []
    for i in range(n_categories):
        t += 1
        replica.clock.now = t
        pk = replica.store.insert_row("Categories", {"Category_Name": f"seed-cat-{i}"})
        cats.append(pk)
        oplog.append({"seq": len(oplog), "wall": t, "replica": replica.hex,
                      "table": "Categories", "pk": pk,
                      "payload": replica.store.get_row("Categories", pk)})
    for i in range(n_products):
        t += 1
        replica.clock.now = t
        pk = replica.store.insert_row("Products", {
            "Category_Id": rng.choice(cats),
            "Product_Name": f"seed-prod-{i}",
            "Price": Decimal(i) + Decimal("0.25"),
            "Is_Favorite": i % 2 == 0,
        })
        prods.append(pk)
        oplog.append({"seq": len(oplog), "wall": t, "replica": replica.hex,
                      "table": "Products", "pk": pk,
                      "payload": replica.store.get_row("Products", pk)})
    for i in range(n_items):
        t += 1
        replica.clock.now = t
        pk = replica.store.insert_row("List", {
            "Product_Id": prods[i % len(prods)],
            "Bought": False,
            "Added_At": t,
        })
        items.append(pk)
        oplog.append({"seq": len(oplog), "wall": t, "replica": replica.hex,
                      "table": "List", "pk": pk,
                      "payload": replica.store.get_row("List", pk)})
    return {"categories": cats, "products": prods, "list_items": items, "end_time": t}


def oracle_state(oplog):
    """Brute-force winner per (table, pk): latest wall time, ties to the
    lexicographically smaller replica, same-replica ties to program order."""
    winners = {}
    for entry in oplog:
        key = (entry["table"], entry["pk"])
        cur = winners.get(key)
        if cur is None or _beats(entry, cur):
            winners[key] = entry
    state = {t: {} for t in APP_TABLES}
    for (table, pk), entry in winners.items():
        if entry["payload"] is not None:
            state[table][pk] = entry["payload"]
    return state


def _beats(a, b):
    if a["wall"] != b["wall"]:
        return a["wall"] > b["wall"]
    if a["replica"] != b["replica"]:
        return a["replica"] < b["replica"]
    return a["seq"] > b["seq"]


def copy_replica_store(store, dst_path, clock=None):
    """Flush + file copy + reopen: an identical offline twin of a store."""
    store.flush()
    shutil.copy(store.path, str(dst_path))
    return open_store(ConnectionSpec(str(dst_path), store.password), clock=clock)
