"""Command-line driver for every workflow.

Exit codes: 0 success, 1 domain error, 2 usage error, 3 transport error.
The store file is picked from --db, then the SHOPLIST_DB environment
variable, then ./ShopList.sdf.
"""

from __future__ import annotations

import contextlib
import json
import os
import sys
from typing import List, Optional

import click

from . import diag, sqlcmd, sync
from .appcore import ShopListApp
from .endpoints import HttpEndpoint
from .errors import ShopListError, TransportFailure
from .server import ServerConfig, run_server
from .store import (
    ConnectionSpec,
    create_store,
    default_store_path,
    open_store,
)

ENV_DB = "SHOPLIST_DB"
APP_TABLES = ("Categories", "Products", "List")


def _resolve_db(ctx) -> str:
    if ctx.obj.get("db"):
        return ctx.obj["db"]
    if os.environ.get(ENV_DB):
        return os.environ[ENV_DB]
    return default_store_path(os.getcwd())


def _spec(ctx) -> ConnectionSpec:
    return ConnectionSpec(_resolve_db(ctx), ctx.obj.get("password", ""))


@contextlib.contextmanager
def _open(ctx):
    store = open_store(_spec(ctx))
    sync.ChangeTracker(store)  # install the change hook
    try:
        yield store
        store.flush()
    finally:
        try:
            store.close()
        except ShopListError:
            pass


def _emit(ctx, data, text: str) -> None:
    if ctx.obj.get("json"):
        click.echo(json.dumps(data, default=str))
    elif text:
        click.echo(text)


@click.group()
@click.option("--db", type=click.Path(), default=None, help="Store file path.")
@click.option("--password", default="", help="Store password.")
@click.option("--json", "json_out", is_flag=True, help="Machine-readable output.")
@click.pass_context
def cli(ctx, db, password, json_out):
    """Offline-first shopping list with merge replication and RDA sync."""
    ctx.ensure_object(dict)
    ctx.obj.update({"db": db, "password": password, "json": json_out})


@cli.command()
@click.pass_context
def init(ctx):
    """Create a new store file with the three app tables, merge-tracked."""
    spec = _spec(ctx)
    store = create_store(spec)
    try:
        sync.ChangeTracker(store).enable_merge_tracking(APP_TABLES)
        store.flush()
    finally:
        store.close()
    _emit(ctx, {"created": spec.data_source}, f"created {spec.data_source}")


# -- category ---------------------------------------------------------------

@cli.group()
def category():
    """Manage product categories."""


@category.command("add")
@click.argument("name")
@click.pass_context
def category_add(ctx, name):
    with _open(ctx) as store:
        cat = ShopListApp(store).add_category(name)
    _emit(ctx, {"id": cat.id, "name": cat.name}, f"{cat.id}\t{cat.name}")


@category.command("list")
@click.pass_context
def category_list(ctx):
    with _open(ctx) as store:
        cats = ShopListApp(store).list_categories()
    _emit(
        ctx,
        [{"id": c.id, "name": c.name} for c in cats],
        "\n".join(f"{c.id}\t{c.name}" for c in cats),
    )


# -- product ----------------------------------------------------------------

def _product_dict(p) -> dict:
    return {
        "id": p.id,
        "category_id": p.category_id,
        "name": p.name,
        "price": str(p.price),
        "is_favorite": p.is_favorite,
    }


def _product_line(p) -> str:
    star = "*" if p.is_favorite else ""
    return f"{p.id}\t{p.name}\t{p.price}{star}"


@cli.group()
def product():
    """Manage products."""


@product.command("add")
@click.argument("name")
@click.argument("price")
@click.option("--category", "category_id", type=int, default=None)
@click.option("--favorite", is_flag=True)
@click.pass_context
def product_add(ctx, name, price, category_id, favorite):
    with _open(ctx) as store:
        p = ShopListApp(store).add_product(category_id, name, price, favorite)
    _emit(ctx, _product_dict(p), _product_line(p))


@product.command("list")
@click.option("--category", "category_id", type=int, default=None)
@click.option("--favorites", is_flag=True)
@click.pass_context
def product_list(ctx, category_id, favorites):
    with _open(ctx) as store:
        rows = ShopListApp(store).list_products(category_id, favorites)
    _emit(ctx, [_product_dict(p) for p in rows], "\n".join(_product_line(p) for p in rows))


@product.command("favorite")
@click.argument("product_id", type=int)
@click.option("--off", is_flag=True, help="Clear instead of set.")
@click.pass_context
def product_favorite(ctx, product_id, off):
    with _open(ctx) as store:
        p = ShopListApp(store).set_favorite(product_id, not off)
    _emit(ctx, _product_dict(p), _product_line(p))


# -- shopping list ----------------------------------------------------------

def _entry_dict(e) -> dict:
    return {
        "id": e.item.id,
        "product_id": e.item.product_id,
        "bought": e.item.bought,
        "display_color": e.item.display_color,
        "added_at": e.item.added_at,
        "product_name": e.product_name,
        "price": str(e.price),
    }


@cli.group("list")
def shoplist_group():
    """Manage the current shopping list."""


@shoplist_group.command("new")
@click.pass_context
def list_new(ctx):
    with _open(ctx) as store:
        cleared = ShopListApp(store).new_shoplist()
    _emit(ctx, {"cleared": cleared}, f"cleared {cleared} items")


@shoplist_group.command("add")
@click.argument("product_id", type=int)
@click.pass_context
def list_add(ctx, product_id):
    with _open(ctx) as store:
        app = ShopListApp(store)
        item = app.add_to_list(product_id)
        prod = app.get_product(product_id)
    _emit(
        ctx,
        {"id": item.id, "product_id": item.product_id, "bought": item.bought,
         "display_color": item.display_color},
        f"{item.id}\t{prod.name}\t{item.display_color}",
    )


@shoplist_group.command("check")
@click.argument("item_id", type=int)
@click.pass_context
def list_check(ctx, item_id):
    with _open(ctx) as store:
        item = ShopListApp(store).check_item(item_id)
    _emit(
        ctx,
        {"id": item.id, "bought": item.bought, "display_color": item.display_color},
        f"{item.id}\t{'bought' if item.bought else 'to buy'}\t{item.display_color}",
    )


@shoplist_group.command("show")
@click.pass_context
def list_show(ctx):
    with _open(ctx) as store:
        entries = ShopListApp(store).current_list()
    _emit(
        ctx,
        [_entry_dict(e) for e in entries],
        "\n".join(
            f"{e.item.id}\t{e.product_name}\t{e.price}\t{e.item.display_color}"
            for e in entries
        ),
    )


# -- sync -------------------------------------------------------------------

_POLICY_CHOICE = click.Choice(["server", "client", "latest"])


@cli.group("sync")
def sync_group():
    """Exchange data with a sync server."""


@sync_group.command("merge")
@click.option("--server", "server_url", required=True)
@click.option("--policy", type=_POLICY_CHOICE, default="latest")
@click.option("--token", default=None)
@click.pass_context
def sync_merge(ctx, server_url, policy, token):
    endpoint = HttpEndpoint(server_url, token=token)
    try:
        with _open(ctx) as store:
            report = sync.merge_exchange(store, endpoint, policy)
    finally:
        endpoint.close()
    conflicts = [c.to_json() for c in report.conflicts]
    lines = [f"applied locally: {report.applied_local}",
             f"applied on server: {report.applied_remote}",
             f"conflicts: {len(conflicts)}"]
    lines += [
        f"  {c['table']}[{c['pk']}] -> {c['winner_replica'][:8]} ({c['policy']})"
        for c in conflicts
    ]
    _emit(
        ctx,
        {"applied_local": report.applied_local,
         "applied_remote": report.applied_remote,
         "conflicts": conflicts},
        "\n".join(lines),
    )


@sync_group.command("pull")
@click.argument("table")
@click.argument("query")
@click.option("--server", "server_url", required=True)
@click.option("--no-tracking", is_flag=True)
@click.option("--token", default=None)
@click.pass_context
def sync_pull(ctx, table, query, server_url, no_tracking, token):
    endpoint = HttpEndpoint(server_url, token=token)
    try:
        with _open(ctx) as store:
            count = sync.rda_pull(store, endpoint, table, query, tracking=not no_tracking)
    finally:
        endpoint.close()
    _emit(ctx, {"rows": count}, f"pulled {count} rows into {table}")


@sync_group.command("push")
@click.argument("table")
@click.option("--server", "server_url", required=True)
@click.option("--token", default=None)
@click.pass_context
def sync_push(ctx, table, server_url, token):
    endpoint = HttpEndpoint(server_url, token=token)
    try:
        with _open(ctx) as store:
            applied, push_errors = sync.rda_push(store, endpoint, table)
    finally:
        endpoint.close()
    lines = [f"applied: {applied}"]
    lines += [f"  {e.table}[{e.pk}]: {e.reason}" for e in push_errors]
    _emit(
        ctx,
        {"applied": applied,
         "errors": [{"table": e.table, "pk": e.pk, "reason": e.reason} for e in push_errors]},
        "\n".join(lines),
    )


@sync_group.command("submit")
@click.argument("sql")
@click.option("--server", "server_url", required=True)
@click.option("--token", default=None)
@click.pass_context
def sync_submit(ctx, sql, server_url, token):
    sqlcmd.parse(sql)  # reject bad SQL before going over the wire
    endpoint = HttpEndpoint(server_url, token=token)
    try:
        affected = sync.rda_submit_sql(endpoint, sql)
    finally:
        endpoint.close()
    _emit(ctx, {"affected": affected}, f"affected: {affected}")


# -- serve / env / bench ----------------------------------------------------

@cli.command()
@click.option("--bind", default="127.0.0.1:8400", help="HOST:PORT to listen on.")
@click.option("--policy", type=_POLICY_CHOICE, default="latest")
@click.option("--token", default=None)
@click.pass_context
def serve(ctx, bind, policy, token):
    """Host this store as a sync server."""
    host, _, port = bind.rpartition(":")
    if not host or not port.isdigit():
        raise click.UsageError(f"--bind must be HOST:PORT, got {bind!r}")
    config = ServerConfig(
        bind=host,
        port=int(port),
        store_path=_resolve_db(ctx),
        password=ctx.obj.get("password", ""),
        default_policy=policy,
        token=token,
    )
    config.validate()
    store = open_store(_spec(ctx))
    sync.ChangeTracker(store)
    try:
        run_server(config, store)
    finally:
        store.close()


@cli.command()
@click.pass_context
def env(ctx):
    """Show current directory, machine name, user name and OS version."""
    info = diag.environment_snapshot()
    data = {
        "current_directory": info.current_directory,
        "machine_name": info.machine_name,
        "user_name": info.user_name,
        "os_version": info.os_version,
    }
    _emit(ctx, data, "\n".join(f"{k}: {v}" for k, v in data.items()))


@cli.command(context_settings={"ignore_unknown_options": True})
@click.argument("args", nargs=-1, type=click.UNPROCESSED)
@click.pass_context
def bench(ctx, args):
    """Run another command and report how long it took."""
    if not args:
        raise click.UsageError("bench needs a command to run")
    argv: List[str] = []
    if ctx.obj.get("db"):
        argv += ["--db", ctx.obj["db"]]
    if ctx.obj.get("password"):
        argv += ["--password", ctx.obj["password"]]
    if ctx.obj.get("json"):
        argv += ["--json"]
    argv += list(args)
    timer = diag.start_measure()
    code = main(argv)
    click.echo(diag.display_measure_result(timer, "shoplist " + " ".join(args)))
    if code != 0:
        sys.exit(code)


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI, mapping errors to the exit-code contract."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.UsageError as e:
        e.show()
        return 2
    except click.ClickException as e:
        e.show()
        return 1
    except TransportFailure as e:
        click.echo(f"error: {e}", err=True)
        return 3
    except ShopListError as e:
        click.echo(f"error: {type(e).__name__}: {e}", err=True)
        return 1
    except SystemExit as e:
        return int(e.code or 0)
    return 0


def entry() -> None:  # console_scripts hook
    sys.exit(main())
