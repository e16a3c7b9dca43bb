import pytest

from tentsurgery import catalog, layout

CATALOG = ("full", "golden", "sqrt2")


@pytest.fixture(scope="session", params=CATALOG)
def beta(request):
    return catalog(request.param)


@pytest.fixture(scope="session")
def descriptors():
    cache = {}

    def get(name, N=10):
        key = (name, N)
        if key not in cache:
            cache[key] = layout(catalog(name), N=N)
        return cache[key]

    return get
