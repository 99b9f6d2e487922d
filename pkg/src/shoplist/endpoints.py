"""Sync endpoints: the client side of the wire.

InProcessEndpoint drives a server store directly (used by tests and as the
oracle for wire equivalence); HttpEndpoint speaks the JSON API of the
server module.  Both expose merge/pull/push/submit taking and returning
plain dicts.
"""

from __future__ import annotations

from typing import Optional

import httpx

from . import errors as E
from . import sync
from .store import Store


class InProcessEndpoint:
    """Talks to a server-side store in the same process."""

    def __init__(self, store: Store, default_policy: str = sync.POLICY_LATEST):
        self.store = store
        self.default_policy = default_policy

    def merge(self, request: dict) -> dict:
        return sync.serve_merge(self.store, request, self.default_policy)

    def pull(self, request: dict) -> dict:
        return sync.serve_pull(self.store, request)

    def push(self, request: dict) -> dict:
        return sync.serve_push(self.store, request)

    def submit(self, request: dict) -> dict:
        return sync.serve_submit(self.store, request)


_ERROR_CLASSES = {
    name: obj
    for name, obj in vars(E).items()
    if isinstance(obj, type) and issubclass(obj, E.ShopListError)
}


def _raise_wire_error(status: int, body: dict) -> None:
    name = body.get("error", "")
    detail = body.get("detail", f"HTTP {status}")
    cls = _ERROR_CLASSES.get(name)
    if cls is E.SqlSyntaxError:
        raise E.SqlSyntaxError(body.get("position", 0), "valid SQL", detail)
    if cls is E.ApplyError:
        cls = None
    if cls is not None:
        raise cls(detail)
    raise E.TransportFailure(f"HTTP {status}: {detail}")


class HttpEndpoint:
    """Talks to a running server over HTTP.

    Accepts either a base URL or a pre-built httpx-compatible client
    (e.g. fastapi.testclient.TestClient).
    """

    def __init__(self, target, token: Optional[str] = None, timeout: float = 30.0):
        if isinstance(target, str):
            self._client = httpx.Client(base_url=target.rstrip("/"), timeout=timeout)
            self._owns_client = True
        else:
            self._client = target
            self._owns_client = False
        self._headers = {"Authorization": f"Bearer {token}"} if token else {}

    def close(self) -> None:
        if self._owns_client:
            self._client.close()

    def _post(self, path: str, payload: dict) -> dict:
        try:
            resp = self._client.post(path, json=payload, headers=self._headers)
        except Exception as e:
            raise E.TransportFailure(f"cannot reach server: {e}") from e
        try:
            body = resp.json()
        except ValueError:
            body = {}
        if resp.status_code >= 400:
            _raise_wire_error(resp.status_code, body if isinstance(body, dict) else {})
        return body

    def merge(self, request: dict) -> dict:
        return self._post("/api/merge", request)

    def pull(self, request: dict) -> dict:
        return self._post("/api/rda/pull", request)

    def push(self, request: dict) -> dict:
        return self._post("/api/rda/push", request)

    def submit(self, request: dict) -> dict:
        return self._post("/api/rda/submit", request)
