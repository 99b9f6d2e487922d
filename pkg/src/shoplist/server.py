"""HTTP service hosting a server store: merge, RDA and app endpoints.

All write requests to the database are serialized behind one lock.  Errors
come back as {"error": name, "detail": text, "position"?: int} with a
status from the mapping below.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from decimal import Decimal
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import errors as E
from . import sync
from .appcore import ShopListApp
from .store import Store

DEFAULT_MAX_REQUEST_BYTES = 1024 * 1024
MIN_REQUEST_LIMIT = 64 * 1024

_STATUS = {
    E.UnknownCategory: 404,
    E.UnknownProduct: 404,
    E.UnknownItem: 404,
    E.UnknownTable: 404,
    E.DuplicateCategory: 409,
    E.DuplicateListItem: 409,
    E.ForeignKeyViolation: 409,
    E.SchemaMismatch: 409,
    E.FileExists: 409,
    E.PendingChangesExist: 409,
    E.TrackingModeConflict: 409,
    E.SqlSyntaxError: 422,
    E.UnsupportedStatement: 422,
    E.NotAQuery: 422,
    E.TypeMismatch: 422,
    E.NullViolation: 422,
    E.UnknownColumn: 422,
    E.InvalidName: 422,
    E.InvalidPrice: 422,
    E.MalformedRequest: 422,
    E.NotTracked: 422,
    E.TrackingDisabled: 422,
    E.TransportFailure: 502,
}


@dataclass(frozen=True)
class ServerConfig:
    bind: str = "127.0.0.1"
    port: int = 8400
    store_path: str = "ShopList.sdf"
    password: str = ""
    default_policy: str = sync.POLICY_LATEST
    max_request_bytes: int = DEFAULT_MAX_REQUEST_BYTES
    token: Optional[str] = None

    def validate(self) -> None:
        if not (1 <= self.port <= 65535):
            raise ValueError(f"port {self.port} out of range")
        if self.max_request_bytes < MIN_REQUEST_LIMIT:
            raise ValueError(f"request limit must be at least {MIN_REQUEST_LIMIT} bytes")
        if self.default_policy not in sync.POLICIES:
            raise ValueError(f"unknown policy {self.default_policy!r}")


def _error_response(exc: E.ShopListError) -> JSONResponse:
    status = 500
    for cls, code in _STATUS.items():
        if isinstance(exc, cls):
            status = code
            break
    body = {"error": type(exc).__name__, "detail": str(exc)}
    if isinstance(exc, E.SqlSyntaxError):
        body["position"] = exc.position
    return JSONResponse(body, status_code=status)


def _price_out(value: Decimal) -> str:
    # drop the storage scale's trailing zeros: 2.5000 -> "2.5", 25.0000 -> "25"
    return format(value.normalize(), "f")


def _product_json(p) -> dict:
    return {
        "id": p.id,
        "category_id": p.category_id,
        "name": p.name,
        "price": _price_out(p.price),
        "is_favorite": p.is_favorite,
    }


def _entry_json(e) -> dict:
    return {
        "id": e.item.id,
        "product_id": e.item.product_id,
        "bought": e.item.bought,
        "display_color": e.item.display_color,
        "added_at": e.item.added_at,
        "product_name": e.product_name,
        "price": _price_out(e.price),
    }


def _parse_price(raw):
    if raw is None:
        raise E.MalformedRequest("price is required")
    if isinstance(raw, bool):
        raise E.InvalidPrice(f"not a price: {raw!r}")
    if isinstance(raw, float):
        raw = str(raw)
    return raw  # appcore validates str/int/Decimal


def create_app(
    store: Store,
    default_policy: str = sync.POLICY_LATEST,
    token: Optional[str] = None,
    max_request_bytes: int = DEFAULT_MAX_REQUEST_BYTES,
) -> FastAPI:
    api = FastAPI(title="shoplist sync server", docs_url=None, redoc_url=None)
    app = ShopListApp(store)
    lock = threading.Lock()

    @api.exception_handler(E.ShopListError)
    async def _domain_error(request: Request, exc: E.ShopListError):
        return _error_response(exc)

    @api.middleware("http")
    async def _guards(request: Request, call_next):
        length = request.headers.get("content-length")
        if length and int(length) > max_request_bytes:
            return JSONResponse(
                {"error": "RequestTooLarge", "detail": "request body too large"},
                status_code=413,
            )
        if token is not None and request.url.path != "/api/health":
            if request.headers.get("authorization") != f"Bearer {token}":
                return JSONResponse(
                    {"error": "Unauthorized", "detail": "missing or bad bearer token"},
                    status_code=401,
                )
        return await call_next(request)

    async def _body(request: Request) -> dict:
        try:
            data = json.loads(await request.body() or b"{}")
        except json.JSONDecodeError as e:
            raise E.MalformedRequest(f"bad JSON body: {e}") from e
        if not isinstance(data, dict):
            raise E.MalformedRequest("body must be a JSON object")
        return data

    # -- health ------------------------------------------------------------

    @api.get("/api/health")
    async def health():
        return {"status": "ok", "format_version": 1}

    # -- sync --------------------------------------------------------------

    @api.post("/api/merge")
    async def merge(request: Request):
        body = await _body(request)
        with lock:
            return sync.serve_merge(store, body, default_policy)

    @api.post("/api/rda/pull")
    async def rda_pull(request: Request):
        body = await _body(request)
        with lock:
            return sync.serve_pull(store, body)

    @api.post("/api/rda/push")
    async def rda_push(request: Request):
        body = await _body(request)
        with lock:
            return sync.serve_push(store, body)

    @api.post("/api/rda/submit")
    async def rda_submit(request: Request):
        body = await _body(request)
        with lock:
            return sync.serve_submit(store, body)

    @api.post("/api/sync")
    async def sync_with_remote(request: Request):
        # the daemon acts as merge client toward a remote server; this is
        # what a UI's sync button calls
        body = await _body(request)
        remote = body.get("remote")
        if not isinstance(remote, str) or not remote:
            raise E.MalformedRequest("remote URL is required")
        policy = body.get("policy", default_policy)
        if policy not in sync.POLICIES:
            raise E.MalformedRequest(f"unknown policy {policy!r}")
        from .endpoints import HttpEndpoint

        endpoint = HttpEndpoint(remote, token=body.get("token"))
        try:
            with lock:
                report = sync.merge_exchange(store, endpoint, policy)
                store.flush()
        finally:
            endpoint.close()
        return {
            "applied_local": report.applied_local,
            "applied_remote": report.applied_remote,
            "conflicts": [c.to_json() for c in report.conflicts],
        }

    # -- app: categories ---------------------------------------------------

    @api.get("/api/categories")
    async def categories():
        with lock:
            return [{"id": c.id, "name": c.name} for c in app.list_categories()]

    @api.post("/api/categories", status_code=201)
    async def add_category(request: Request):
        body = await _body(request)
        name = body.get("name")
        if not isinstance(name, str):
            raise E.MalformedRequest("name is required")
        with lock:
            cat = app.add_category(name)
            store.flush()
        return {"id": cat.id, "name": cat.name}

    # -- app: products -----------------------------------------------------

    @api.get("/api/products")
    async def products(category_id: Optional[int] = None, favorites: bool = False):
        with lock:
            rows = app.list_products(category_id=category_id, favorites_only=favorites)
        return [_product_json(p) for p in rows]

    @api.post("/api/products", status_code=201)
    async def add_product(request: Request):
        body = await _body(request)
        name = body.get("name")
        if not isinstance(name, str):
            raise E.MalformedRequest("name is required")
        category_id = body.get("category_id")
        if category_id is not None and not isinstance(category_id, int):
            raise E.MalformedRequest("category_id must be an integer")
        with lock:
            prod = app.add_product(
                category_id=category_id,
                name=name,
                price=_parse_price(body.get("price")),
                favorite=bool(body.get("favorite", False)),
            )
            store.flush()
        return _product_json(prod)

    @api.patch("/api/products/{product_id}/favorite")
    async def set_favorite(product_id: int, request: Request):
        body = await _body(request)
        favorite = body.get("favorite")
        if not isinstance(favorite, bool):
            raise E.MalformedRequest("favorite must be a boolean")
        with lock:
            prod = app.set_favorite(product_id, favorite)
            store.flush()
        return _product_json(prod)

    # -- app: shopping list ------------------------------------------------

    @api.get("/api/list")
    async def current_list():
        with lock:
            return [_entry_json(e) for e in app.current_list()]

    @api.post("/api/list", status_code=201)
    async def add_to_list(request: Request):
        body = await _body(request)
        product_id = body.get("product_id")
        if not isinstance(product_id, int):
            raise E.MalformedRequest("product_id must be an integer")
        with lock:
            item = app.add_to_list(product_id)
            prod = app.get_product(item.product_id)
            store.flush()
        return {
            "id": item.id,
            "product_id": item.product_id,
            "bought": item.bought,
            "display_color": item.display_color,
            "added_at": item.added_at,
            "product_name": prod.name,
            "price": _price_out(prod.price),
        }

    @api.post("/api/list/new")
    async def new_list():
        with lock:
            cleared = app.new_shoplist()
            store.flush()
        return {"cleared": cleared}

    @api.patch("/api/list/{item_id}/check")
    async def check_item(item_id: int):
        with lock:
            item = app.check_item(item_id)
            store.flush()
        return {
            "id": item.id,
            "product_id": item.product_id,
            "bought": item.bought,
            "display_color": item.display_color,
            "added_at": item.added_at,
        }

    return api


def run_server(config: ServerConfig, store: Store) -> None:  # pragma: no cover
    import uvicorn

    config.validate()
    api = create_app(
        store,
        default_policy=config.default_policy,
        token=config.token,
        max_request_bytes=config.max_request_bytes,
    )
    uvicorn.run(api, host=config.bind, port=config.port, log_level="warning")
