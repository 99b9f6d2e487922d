import pytest

from shoplist.store import ConnectionSpec, create_store


class FakeClock:
    """Manually advanced millisecond clock for deterministic tests."""

    def __init__(self, now=1_000):
        self.now = now

    def __call__(self):
        return self.now

    def advance(self, ms=1):
        self.now += ms
        return self.now


@pytest.fixture
def clock():
    return FakeClock()


@pytest.fixture
def store_factory(tmp_path):
    """Create stores in the test's tmp dir; closes leftovers on teardown."""
    created = []
    counter = [0]

    def make(name=None, password="", schema=None, clock=None):
        counter[0] += 1
        path = tmp_path / (name or f"store{counter[0]}.sdf")
        kwargs = {"clock": clock}
        if schema is not None:
            kwargs["schema"] = schema
        store = create_store(ConnectionSpec(str(path), password), **kwargs)
        created.append(store)
        return store

    yield make
    for store in created:
        try:
            store.close()
        except Exception:
            pass


@pytest.fixture
def store(store_factory, clock):
    return store_factory(clock=clock)
