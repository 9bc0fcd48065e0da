import pytest

from app.config import settings
from app.schemas.search import table_config
from app.services.forms import configure_cache
from app.services.search import run_grid

# (n, a, x, y) points with |F_{n,a}(x, y)| = 1 taken from the published table
EXOTIC_POINTS = [
    (0, 2, -14, -9),
    (0, 2, 13, 4),
    (0, 3, 2, 1),
    (0, 5, -3, -1),
    (0, 5, 19, -1),
    (1, 1, -3, 2),
    (1, 2, 7, 3),
    (2, 2, -7, -1),
    (3, 1, -2, 9),
    (4, 2, 3, 2),
]


@pytest.fixture(autouse=True)
def restore_settings():
    """The CLI writes resolved values into the shared settings object."""
    saved = {name: getattr(settings, name) for name in type(settings).model_fields}
    yield
    for name, value in saved.items():
        setattr(settings, name, value)
    configure_cache(settings.memo_limit)


@pytest.fixture
def exotic_points():
    return list(EXOTIC_POINTS)


@pytest.fixture
def sample_grid():
    """Small deterministic (n, a, x, y) grid, (0, 0) excluded."""
    return [
        (n, a, x, y)
        for n in (0, 1, 3, 7)
        for a in (1, 2, 3, 5)
        for x in (-4, -1, 0, 2, 5)
        for y in (-3, 0, 1, 4)
        if (x, y) != (0, 0)
    ]


@pytest.fixture(scope="session")
def table_solutions():
    """Every solution of |F_{n,a}(x, y)| = 1 over the full published table range."""
    return run_grid(table_config())
